#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "spampur/cli.hpp"

using namespace spampur;
using namespace spampur::cli;

namespace {

namespace fs = std::filesystem;

struct Invocation {
    int code = 0;
    std::string out;
    std::string err;
};

Invocation invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "spampur");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("spampur_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST(ParseIntRange, Forms) {
    EXPECT_EQ(parse_int_range("0..4"), (std::vector<int>{0, 1, 2, 3, 4}));
    EXPECT_EQ(parse_int_range("1,3"), (std::vector<int>{1, 3}));
    EXPECT_EQ(parse_int_range("0..1,5"), (std::vector<int>{0, 1, 5}));
    EXPECT_EQ(parse_int_range(" 2 "), (std::vector<int>{2}));
    EXPECT_THROW(parse_int_range("4..1"), InvalidParams);
    EXPECT_THROW(parse_int_range("x"), InvalidParams);
    EXPECT_THROW(parse_int_range("1.5"), InvalidParams);
    EXPECT_THROW(parse_int_range(""), InvalidParams);
}

TEST(ParseRealList, Forms) {
    EXPECT_EQ(parse_real_list("0.9"), (std::vector<double>{0.9}));
    EXPECT_EQ(parse_real_list("0.9,0.95"), (std::vector<double>{0.9, 0.95}));
    const auto r = parse_real_list("0.9..0.99:0.01");
    ASSERT_EQ(r.size(), 10u);
    EXPECT_NEAR(r.back(), 0.99, 1e-12);
    EXPECT_THROW(parse_real_list("0.9..0.99"), InvalidParams);
    EXPECT_THROW(parse_real_list("0.9..0.8:0.01"), InvalidParams);
    EXPECT_THROW(parse_real_list("0.9..0.99:0"), InvalidParams);
    EXPECT_THROW(parse_real_list("abc"), InvalidParams);
}

TEST(ParseArgs, DefaultsAndFlags) {
    const char* argv[] = {"spampur", "purify-meas", "--f", "0.9,0.8", "-n", "1..2", "--format", "json"};
    std::ostringstream out, err;
    const ParseOutcome p = parse_args(8, argv, out, err);
    ASSERT_TRUE(p.config);
    EXPECT_EQ(p.config->command, Command::purify_meas);
    EXPECT_EQ(p.config->f, (std::vector<double>{0.9, 0.8}));
    EXPECT_EQ(p.config->q, (std::vector<double>{0.05}));
    EXPECT_EQ(p.config->depths, (std::vector<int>{1, 2}));
    EXPECT_EQ(p.config->format, Format::json);
    EXPECT_FALSE(p.config->output);
}

TEST(ParseArgs, FlagsBeatConfigFile) {
    const fs::path dir = scratch("config");
    const fs::path file = dir / "run.ini";
    std::ofstream(file) << "q=0.2\nf=0.7\n";
    const std::string path = file.string();
    const char* argv[] = {"spampur", "fixed-point", "--config", path.c_str(), "--f", "0.8"};
    std::ostringstream out, err;
    const ParseOutcome p = parse_args(6, argv, out, err);
    ASSERT_TRUE(p.config) << err.str();
    EXPECT_EQ(p.config->f, (std::vector<double>{0.8}));
    EXPECT_EQ(p.config->q, (std::vector<double>{0.2}));
    fs::remove_all(dir);
}

TEST(ParseArgs, Rejections) {
    EXPECT_EQ(invoke({"frobnicate"}).code, kInvalidInput);
    EXPECT_EQ(invoke({}).code, kInvalidInput);
    EXPECT_EQ(invoke({"purify-prep", "--format", "xml"}).code, kInvalidInput);
    EXPECT_EQ(invoke({"purify-prep", "-n", "3..1"}).code, kInvalidInput);
    EXPECT_EQ(invoke({"purify-prep", "--bogus", "1"}).code, kInvalidInput);
    EXPECT_EQ(invoke({"--help"}).code, kOk);
}

TEST(Run, PurifyMeasRow) {
    const Invocation r = invoke({"purify-meas", "--f", "0.95", "--q", "0.05", "--m", "0..2"});
    EXPECT_EQ(r.code, kOk);
    EXPECT_EQ(r.out,
              "f,q,eps,m,noise,success\n"
              "0.95,0.05,0,0,0.05,1\n"
              "0.95,0.05,0,1,0.00549450549451,0.8645\n"
              "0.95,0.05,0,2,0.000579621720561,0.778525\n");
}

TEST(Run, PurifyPrepInvalidParams) {
    const Invocation r = invoke({"purify-prep", "--f", "0.4"});
    EXPECT_EQ(r.code, kInvalidInput);
    EXPECT_NE(r.err.find("error:"), std::string::npos);
    EXPECT_TRUE(r.out.empty());
}

TEST(Run, ConditionText) {
    EXPECT_EQ(invoke({"condition", "--f", "0.99", "--q", "0.01", "--eps", "0.05"}).out,
              "not purifiable (eps_c = 0.0374)\n");
    EXPECT_EQ(invoke({"condition", "--f", "0.99", "--q", "0.01", "--eps", "0.03"}).out,
              "purifiable (eps_c = 0.0374)\n");
    EXPECT_EQ(invoke({"condition", "--f", "0.9", "--q", "0.05", "--eps", "0.01"}).out, "purifiable\n");
}

TEST(Run, FixedPointAndSwapJson) {
    const Invocation fp = invoke({"fixed-point", "--eps", "0.05", "--format", "json"});
    ASSERT_EQ(fp.code, kOk);
    const auto j = nlohmann::json::parse(fp.out);
    EXPECT_NEAR(j[0]["f_inf"].get<double>(), 0.984, 5e-4);
    const Invocation sw = invoke({"swap", "-n", "0,3", "--format", "json"});
    const auto s = nlohmann::json::parse(sw.out);
    EXPECT_NEAR(s[0]["fidelity"].get<double>(), 0.9025, 1e-12);
    EXPECT_NEAR(s[1]["fidelity"].get<double>(), 0.99988, 5e-6);
    EXPECT_EQ(invoke({"swap", "--eps", "0.02", "-n", "2"}).code, kOk);
}

TEST(Run, VerifyFromProbsAndCounts) {
    const Invocation a =
        invoke({"verify", "--probs", R"({"p00":0.666,"p01":0.154,"p10":0.09,"p11":0.09})", "--format", "json"});
    EXPECT_EQ(a.code, kOk) << a.err;
    EXPECT_NE(a.err.find("f=0.9000 q=0.1000 eps=0.0000"), std::string::npos) << a.err;
    const auto j = nlohmann::json::parse(a.out);
    EXPECT_NEAR(j[0]["q"].get<double>(), 0.1, 1e-8);
    EXPECT_TRUE(j[0]["consistent"].get<bool>());
    EXPECT_TRUE(j[0]["alt_f"].is_null());

    const Invocation b = invoke({"verify", "--counts", R"({"p00":666,"p01":154,"p10":90,"p11":90})"});
    EXPECT_EQ(b.code, kOk);
    EXPECT_NE(b.err.find("f=0.9000 q=0.1000 eps=0.0000"), std::string::npos);
}

TEST(Run, VerifyFlagsAndErrors) {
    EXPECT_EQ(invoke({"verify", "--probs", R"({"p00":0.5,"p01":0,"p10":0,"p11":0.5})"}).code, kFlagged);
    EXPECT_EQ(invoke({"verify"}).code, kInvalidInput);
    EXPECT_EQ(invoke({"verify", "--probs", "{not json"}).code, kInvalidInput);
    EXPECT_EQ(invoke({"verify", "--probs", R"({"p00":0.5,"p01":0.5})"}).code, kInvalidInput);
    EXPECT_EQ(invoke({"verify", "--probs", R"({"p00":0.5,"p01":0.5,"p10":0.5,"p11":0.5})"}).code, kInvalidInput);
}

TEST(Run, DistillFlagsUndistillableCells) {
    const Invocation bad = invoke({"distill", "-n", "0", "--F0", "0.6"});
    EXPECT_EQ(bad.code, kFlagged);
    EXPECT_NE(bad.out.find(",false,0,nan,nan,nan"), std::string::npos) << bad.out;
    const Invocation ok = invoke({"distill", "-n", "1", "--F0", "0.7", "--format", "json"});
    EXPECT_EQ(ok.code, kOk);
    const auto j = nlohmann::json::parse(ok.out);
    EXPECT_NEAR(j[0]["copies"].get<double>() / 1.323e9, 1.0, 5e-3);
}

TEST(Run, TablesAreDeterministic) {
    const fs::path a = scratch("tables_a");
    const fs::path b = scratch("tables_b");
    ASSERT_EQ(invoke({"tables", "-o", a.string()}).code, kOk);
    ASSERT_EQ(invoke({"tables", "-o", b.string()}).code, kOk);
    for (const char* name :
         {"meas_purification.csv", "critical_epsilon.csv", "verification.csv", "distillation_copies.csv"}) {
        ASSERT_TRUE(fs::exists(a / name)) << name;
        EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
    }
    const std::string crit = slurp(a / "critical_epsilon.csv");
    for (const char* v : {",0.0374\n", ",0.0986\n", ",0.1460\n", ",0.1830\n", ",0.2236\n"}) {
        EXPECT_NE(crit.find(v), std::string::npos) << v;
    }
    EXPECT_NE(slurp(a / "distillation_copies.csv").find("undistillable"), std::string::npos);
    ASSERT_EQ(invoke({"tables", "-o", a.string(), "--format", "json"}).code, kOk);
    EXPECT_TRUE(nlohmann::json::accept(slurp(a / "verification.json")));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Run, OutputFileAndIoFailure) {
    const fs::path dir = scratch("output");
    const fs::path file = dir / "prep.csv";
    const Invocation r = invoke({"purify-prep", "-n", "0..1", "-o", file.string()});
    EXPECT_EQ(r.code, kOk);
    EXPECT_TRUE(r.out.empty());
    EXPECT_EQ(slurp(file), "f,q,eps,n,fidelity,success\n0.95,0.05,0,0,0.95,1\n0.95,0.05,0,1,0.994505494505,0.8645\n");
    EXPECT_EQ(invoke({"purify-prep", "-o", "/nonexistent-dir/sub/x.csv"}).code, kIoFailure);
    fs::remove_all(dir);
}

TEST(Run, OracleCheckPasses) {
    const Invocation r = invoke({"oracle-check"});
    EXPECT_EQ(r.code, kOk);
    EXPECT_NE(r.err.find("all oracle checks passed"), std::string::npos);
}
