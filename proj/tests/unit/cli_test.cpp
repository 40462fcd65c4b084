#include <gtest/gtest.h>

#include <filesystem>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "../../tools/cli.hpp"
#include "escher/repository.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using escher::testing::fixture;
using escher::testing::golden;
using escher::testing::scratch_dir;
using escher::testing::slurp;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "escher");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = escher::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

void put(const fs::path& p, const std::string& text) { escher::write_file(p, text); }

// A project holding BANK_ACCOUNT v1 in release 1 and v2 in release 2, with the
// hand-fixed 1->2 transformer in place of the generated stub.
struct BankProject {
  fs::path root;
  fs::path work;
  fs::path proj;

  explicit BankProject(const std::string& name, bool fixed = true) {
    root = scratch_dir(name);
    work = root / "work";
    proj = root / "proj";
    fs::create_directories(work);
    fs::copy_file(fixture("bank_account_v1.esc"), work / "bank_account.esc");
    EXPECT_EQ(cli({"--project", proj.string(), "release", work.string()}).code, 0);
    fs::copy_file(fixture("bank_account_v2.esc"), work / "bank_account.esc",
                  fs::copy_options::overwrite_existing);
    EXPECT_EQ(cli({"--project", proj.string(), "release", work.string()}).code, 0);
    if (fixed) put(proj / "handlers" / "BANK_ACCOUNT" / "1_to_2.est", slurp(fixture("bank_account_1_to_2_fixed.est")));
  }
  ~BankProject() { fs::remove_all(root); }

  std::string p() const { return proj.string(); }
};

}  // namespace

TEST(Cli, ParseMatchesGolden) {
  EXPECT_EQ(cli({"parse", fixture("bank_account_v1.esc")}).out, slurp(golden("bank_account_v1.canonical.esc")));
  EXPECT_EQ(cli({"parse", fixture("bank_account_v2.esc")}).out, slurp(golden("bank_account_v2.canonical.esc")));
}

TEST(Cli, DiffMatchesGolden) {
  const CliResult r = cli({"diff", fixture("bank_account_v1.esc"), fixture("bank_account_v2.esc")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, slurp(golden("bank_account_diff.txt")));
}

TEST(Cli, GenMatchesGoldenAndWarnsOnStderr) {
  const CliResult text = cli({"gen", fixture("bank_account_v1.esc"), fixture("bank_account_v2.esc")});
  EXPECT_EQ(text.code, 0);
  EXPECT_EQ(text.out, slurp(golden("bank_account_1_to_2.est")));
  EXPECT_NE(text.err.find("warning: "), std::string::npos);

  const CliResult machine =
      cli({"--format", "machine", "gen", fixture("bank_account_v1.esc"), fixture("bank_account_v2.esc")});
  EXPECT_EQ(machine.out, text.out);
  EXPECT_TRUE(machine.err.empty());
}

TEST(Cli, PerMatchesGolden) {
  EXPECT_EQ(cli({"per", fixture("arraylist.hist")}).out, slurp(golden("arraylist_per.txt")));
  EXPECT_EQ(cli({"per", fixture("java_util.hist")}).out, slurp(golden("java_util_per.txt")));
}

TEST(Cli, ReleaseLifecycle) {
  const fs::path root = scratch_dir("cli_release");
  const fs::path work = root / "work";
  const fs::path proj = root / "proj";
  fs::create_directories(work);
  fs::copy_file(fixture("bank_account_v1.esc"), work / "bank_account.esc");

  CliResult r = cli({"--project", proj.string(), "release", work.string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "release 1\nclass BANK_ACCOUNT version 1 new\n");
  EXPECT_EQ(cli({"--project", proj.string(), "release", work.string()}).out, "no-op\n");

  // Working copy carries the old tag; release bumps it and patches the header.
  std::string v2 = slurp(fixture("bank_account_v2.esc"));
  v2.replace(v2.find("\nversion 2"), 10, "\nversion 1");
  put(work / "bank_account.esc", v2);
  r = cli({"--project", proj.string(), "release", work.string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, slurp(golden("release_2_report.txt")));
  EXPECT_NE(slurp(work / "bank_account.esc").find("version 2"), std::string::npos);
  EXPECT_TRUE(fs::exists(proj / "handlers" / "BANK_ACCOUNT" / "1_to_2.est"));
  EXPECT_EQ(slurp(proj / "handlers" / "BANK_ACCOUNT" / "1_to_2.est"), slurp(golden("bank_account_1_to_2.est")));

  v2.replace(v2.find("\nversion 1"), 10, "\nversion 7");
  v2.replace(v2.find("balance > 0"), 11, "balance >= 0");
  put(work / "bank_account.esc", v2);
  r = cli({"--project", proj.string(), "release", work.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(first_line(r.out).rfind("VersionTagTamper", 0), 0u) << r.out;

  EXPECT_EQ(cli({"--project", proj.string(), "per"}).out, "per BANK_ACCOUNT = 0.50\nrelease per = 0.50\n");
  fs::remove_all(root);
}

TEST(Cli, GenRegistersIntoProject) {
  BankProject b("cli_gen", false);
  const CliResult again = cli({"--project", b.p(), "gen", fixture("bank_account_v1.esc"), fixture("bank_account_v2.esc")});
  EXPECT_EQ(again.code, 0) << again.out;
  EXPECT_EQ(first_line(again.out).rfind("registered ", 0), 0u);

  std::string edited = slurp(fixture("bank_account_1_to_2_fixed.est"));
  const fs::path est = b.root / "fixed.est";
  put(est, edited);
  put(b.proj / "handlers" / "BANK_ACCOUNT" / "1_to_2.est", edited);
  const CliResult refused = cli({"--project", b.p(), "gen", fixture("bank_account_v1.esc"), fixture("bank_account_v2.esc")});
  EXPECT_EQ(refused.code, 1);
  EXPECT_EQ(first_line(refused.out), "OverwriteRefused BANK_ACCOUNT 1 2");
  EXPECT_EQ(slurp(b.proj / "handlers" / "BANK_ACCOUNT" / "1_to_2.est"), edited);
  EXPECT_EQ(cli({"--project", b.p(), "gen", "--force", fixture("bank_account_v1.esc"), fixture("bank_account_v2.esc")}).code, 0);
  EXPECT_EQ(slurp(b.proj / "handlers" / "BANK_ACCOUNT" / "1_to_2.est"), slurp(golden("bank_account_1_to_2.est")));

  const CliResult back = cli({"--project", b.p(), "gen", fixture("bank_account_v2.esc"), fixture("bank_account_v1.esc")});
  EXPECT_EQ(back.code, 0) << back.out;
  EXPECT_TRUE(fs::exists(b.proj / "handlers" / "BANK_ACCOUNT" / "2_to_1.est"));
}

TEST(Cli, MigrateWithHandFixedTransformer) {
  BankProject b("cli_migrate");
  const CliResult r = cli({"--project", b.p(), "migrate", fixture("bank_account_v1.eso"), "--to-release", "2"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_EQ(r.out, slurp(golden("bank_account_v2_migrated.eso")));

  const fs::path out = b.root / "out.eso";
  EXPECT_EQ(cli({"--project", b.p(), "migrate", fixture("bank_account_v1.eso"), "--to", "BANK_ACCOUNT=2",
                 "--out", out.string()})
                .code,
            0);
  EXPECT_EQ(slurp(out), slurp(golden("bank_account_v2_migrated.eso")));

  const CliResult chk = cli({"check", out.string(), fixture("bank_account_v2.esc")});
  EXPECT_EQ(chk.code, 0);
  EXPECT_EQ(chk.out, "ok BANK_ACCOUNT 0\n");
}

TEST(Cli, RetrievalTaxonomy) {
  BankProject b("cli_taxonomy", false);
  // Stub needs an input.
  CliResult r = cli({"--project", b.p(), "migrate", fixture("bank_account_v1.eso"), "--to-release", "2"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(first_line(r.out), "MissingInput balance");

  // Supplied input breaks the new invariant.
  r = cli({"--project", b.p(), "migrate", fixture("bank_account_v1.eso"), "--to-release", "2", "--inputs",
           "BANK_ACCOUNT.balance=0"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(first_line(r.out), "InvariantViolation BANK_ACCOUNT 0 valid_account");

  r = cli({"--format", "machine", "--project", b.p(), "migrate", fixture("bank_account_v1.eso"), "--to-release",
           "2", "--inputs", "BANK_ACCOUNT.balance=0"});
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(r.err.empty());

  r = cli({"--no-assert", "--project", b.p(), "migrate", fixture("bank_account_v1.eso"), "--to-release", "2",
           "--inputs", "BANK_ACCOUNT.balance=0"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("balance: INTEGER = 0"), std::string::npos) << r.out;

  r = cli({"--project", b.p(), "migrate", fixture("bank_account_v1.eso"), "--to-release", "2", "--inputs",
           "BANK_ACCOUNT.balance=5"});
  EXPECT_EQ(r.code, 0) << r.out;

  // No handler left for the class.
  fs::remove(b.proj / "handlers" / "BANK_ACCOUNT" / "1_to_2.est");
  std::string manifest = slurp(b.proj / "escher.manifest");
  manifest.erase(manifest.find("transformer"));
  put(b.proj / "escher.manifest", manifest);
  r = cli({"--project", b.p(), "migrate", fixture("bank_account_v1.eso"), "--to-release", "2"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(first_line(r.out), "HandlerMissing BANK_ACCOUNT");

  // Handlers exist for the class, just not in the needed direction.
  EXPECT_EQ(cli({"--project", b.p(), "gen", fixture("bank_account_v2.esc"), fixture("bank_account_v1.esc")}).code, 0);
  r = cli({"--project", b.p(), "migrate", fixture("bank_account_v1.eso"), "--to-release", "2"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(first_line(r.out), "TransformationMissing BANK_ACCOUNT 1 2");

  r = cli({"--project", b.p(), "migrate", fixture("bank_account_v1.eso"), "--to-release", "9"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(first_line(r.out).rfind("UnknownVersion", 0), 0u);
}

TEST(Cli, HandlerMissingForUnreleasedClass) {
  BankProject b("cli_handler");
  const fs::path obj = b.root / "other.eso";
  put(obj, "ESCHER-OBJECTS 1\nobj 0 GHOST version 1\n  x: INTEGER = 1\nend\n");
  const CliResult r = cli({"--project", b.p(), "migrate", obj.string(), "--to", "BANK_ACCOUNT=2"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(first_line(r.out).rfind("UnknownClass GHOST", 0), 0u) << r.out;
}

TEST(Cli, MultiHopAndStrictDirect) {
  const fs::path root = scratch_dir("cli_multihop");
  const fs::path work = root / "work";
  const fs::path proj = root / "proj";
  fs::create_directories(work);
  const fs::path f = work / "p.esc";
  put(f, "class P feature x: INTEGER end\n");
  EXPECT_EQ(cli({"--project", proj.string(), "release", work.string()}).code, 0);
  put(f, "version 2 class P feature x: REAL end\n");
  EXPECT_EQ(cli({"--project", proj.string(), "release", work.string()}).code, 0);
  put(f, "version 3 class P feature x: STRING end\n");
  EXPECT_EQ(cli({"--project", proj.string(), "release", work.string()}).code, 0);

  const fs::path obj = root / "p.eso";
  put(obj, "ESCHER-OBJECTS 1\nobj 0 P version 1\n  x: INTEGER = 7\nend\n");
  CliResult r = cli({"--project", proj.string(), "migrate", obj.string(), "--to", "P=3"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("obj 0 P version 3"), std::string::npos) << r.out;

  r = cli({"--strict-direct", "--project", proj.string(), "migrate", obj.string(), "--to", "P=3"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(first_line(r.out), "TransformationMissing P 1 3");

  // Downgrade works once a backwards transformer is generated on demand.
  const fs::path v3 = root / "p3.esc";
  const fs::path v2 = root / "p2.esc";
  put(v3, "version 3 class P feature x: STRING end\n");
  put(v2, "version 2 class P feature x: REAL end\n");
  r = cli({"--project", proj.string(), "migrate", obj.string(), "--to", "P=2"});
  EXPECT_EQ(r.code, 0);
  const fs::path at3 = root / "p_at3.eso";
  EXPECT_EQ(cli({"--project", proj.string(), "migrate", obj.string(), "--to", "P=3", "--out", at3.string()}).code, 0);
  EXPECT_EQ(cli({"--project", proj.string(), "migrate", at3.string(), "--to", "P=2"}).code, 1);
  EXPECT_EQ(cli({"--project", proj.string(), "gen", v3.string(), v2.string()}).code, 0);
  r = cli({"--project", proj.string(), "migrate", at3.string(), "--to", "P=2"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("x: REAL = 7"), std::string::npos) << r.out;
  fs::remove_all(root);
}

TEST(Cli, ProjectSchemaReferences) {
  BankProject b("cli_refs");
  const CliResult r = cli({"--project", b.p(), "diff", "BANK_ACCOUNT@1", "BANK_ACCOUNT@2"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.out, slurp(golden("bank_account_diff.txt")));
}

TEST(Cli, ExitCodeMatrix) {
  const fs::path root = scratch_dir("cli_codes");
  const fs::path dup = root / "dup.esc";
  put(dup, "class C feature x: INTEGER x: STRING end\n");
  const fs::path other = root / "other.esc";
  put(other, "class D feature end\n");
  const fs::path bad_hist = root / "bad.hist";
  put(bad_hist, "class A\nversions 2\ntf 1 5\n");
  const fs::path bad_obj = root / "bad.eso";
  put(bad_obj, "ESCHER-OBJECTS 1\nobj 0 BANK_ACCOUNT version 1\n  info: STRING = \"x\"\n"
               "  tot_deposits: INTEGER = 1\n  tot_withdrawals: INTEGER = 5\nend\n");

  struct Case {
    std::vector<std::string> args;
    int code;
    const char* summary;
  };
  const std::vector<Case> cases = {
      {{"--help"}, 0, nullptr},
      {{"check", fixture("bank_account_v1.eso"), fixture("bank_account_v1.esc")}, 0, "ok BANK_ACCOUNT 0"},
      {{"parse", dup.string()}, 1, "DuplicateAttribute"},
      {{"diff", fixture("bank_account_v1.esc"), other.string()}, 1, "MismatchedClassIdentity"},
      {{"gen", fixture("bank_account_v1.esc"), fixture("bank_account_v1.esc")}, 1, "InvalidTransformer"},
      {{"per", bad_hist.string()}, 1, "FormatError"},
      {{"check", bad_obj.string(), fixture("bank_account_v1.esc")}, 1,
       "InvariantViolation BANK_ACCOUNT 0 valid_account"},
      {{"check", fixture("bank_account_v1.eso"), fixture("bank_account_v2.esc")}, 1, "UnknownVersion"},
      {{"parse", (root / "missing.esc").string()}, 2, "IoError"},
      {{"per", (root / "missing.hist").string()}, 2, "IoError"},
      {{"migrate", fixture("bank_account_v1.eso"), "--to-release", "1"}, 2, nullptr},
      {{"bogus"}, 2, nullptr},
      {{}, 2, nullptr},
      {{"--format", "xml", "parse", dup.string()}, 2, nullptr},
  };
  for (const auto& c : cases) {
    const CliResult r = cli(c.args);
    std::string joined;
    for (const auto& a : c.args) joined += a + " ";
    EXPECT_EQ(r.code, c.code) << joined << "\n" << r.out << r.err;
    if (c.summary) EXPECT_EQ(first_line(r.out).rfind(c.summary, 0), 0u) << joined << "\n" << r.out;
  }

  BankProject b("cli_codes_proj");
  EXPECT_EQ(cli({"--project", b.p(), "migrate", fixture("bank_account_v1.eso"), "--inputs", "balance=1"}).code, 2);
  EXPECT_EQ(cli({"--project", b.p(), "migrate", fixture("bank_account_v1.eso"), "--to", "BANK_ACCOUNT"}).code, 2);
  EXPECT_EQ(cli({"--project", b.p(), "per", fixture("arraylist.hist")}).code, 2);
  EXPECT_EQ(cli({"--project", b.p(), "release", (root / "nowhere").string()}).code, 2);
  fs::remove_all(root);
}
