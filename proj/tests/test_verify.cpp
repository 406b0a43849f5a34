#include <gtest/gtest.h>

#include "fbh/verify.hpp"

using namespace fbh;

namespace {

void expect_all_pass(const std::vector<verify::CheckResult>& results)
{
    ASSERT_FALSE(results.empty());
    for (const auto& r : results) EXPECT_TRUE(r.pass) << r.suite << "/" << r.name << " residual " << r.residual << " " << r.detail;
}

} // namespace

TEST(VerifySuites, IdentityPasses) { expect_all_pass(verify::identity_suite({})); }

TEST(VerifySuites, PsiPasses) { expect_all_pass(verify::psi_suite({})); }

TEST(VerifySuites, InvariancePasses) { expect_all_pass(verify::invariance_suite({})); }

TEST(VerifySuites, OraclePasses)
{
    verify::Config cfg;
    cfg.seed = 42;
    expect_all_pass(verify::oracle_suite(cfg));
}

TEST(VerifySuites, DeterministicForFixedSeed)
{
    verify::Config cfg;
    cfg.seed = 7;
    cfg.samples = 10000;
    const auto a = verify::oracle_suite(cfg);
    const auto b = verify::oracle_suite(cfg);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].residual, b[i].residual);
        EXPECT_EQ(a[i].detail, b[i].detail);
    }
}

TEST(VerifySuites, FailureCarriesReproducibleCase)
{
    verify::detail::Worst w("s", "c", 1.0);
    w.record(0.5, "first");
    w.record(2.0, "seed=3 n=1");
    w.record(1.5, "third");
    const verify::CheckResult r = w.finish();
    EXPECT_FALSE(r.pass);
    EXPECT_EQ(r.residual, 2.0);
    EXPECT_EQ(r.detail, "seed=3 n=1");

    verify::detail::Worst nan("s", "c", 1.0);
    nan.record(std::nan(""), "bad");
    nan.record(0.1, "good");
    EXPECT_FALSE(nan.finish().pass);
}

TEST(VerifySuites, TableHasOneRowPerCheck)
{
    const auto results = verify::identity_suite({});
    const report::Table t = verify::to_table(results);
    EXPECT_EQ(t.rows().size(), results.size());
    EXPECT_TRUE(report::matches_table_schema(t.json()));
}
