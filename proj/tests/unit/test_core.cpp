#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <gtest/gtest.h>

#include "causalfm/core/csv.hpp"
#include "causalfm/core/error.hpp"
#include "causalfm/core/parallel.hpp"
#include "causalfm/core/rng.hpp"
#include "causalfm/core/series.hpp"

using namespace causalfm;

namespace {

MultiSeries ramp_panel(std::size_t t, std::size_t n) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = static_cast<double>(i * 10 + j);
    }
    std::vector<std::string> names;
    for (std::size_t j = 0; j < n; ++j) names.push_back("s" + std::to_string(j));
    return MultiSeries(names, m);
}

std::vector<double> values(const TimeSeries &s) {
    return {s.values().begin(), s.values().end()};
}

}  // namespace

TEST(TimeSeries, RejectsEmptyAndNonFinite) {
    EXPECT_THROW(TimeSeries("x", {}), InvalidArgument);
    EXPECT_THROW(TimeSeries("x", {1.0, std::numeric_limits<double>::quiet_NaN()}), InvalidArgument);
    EXPECT_THROW(TimeSeries("x", {std::numeric_limits<double>::infinity()}), InvalidArgument);
    EXPECT_NO_THROW(TimeSeries("x", {1.0}));
}

TEST(MinMaxScale, Examples) {
    EXPECT_EQ(values(minmax_scale(TimeSeries("a", {1, 2, 3})).series), (std::vector<double>{0, 0.5, 1}));

    const auto constant = minmax_scale(TimeSeries("b", {5, 5, 5}));
    EXPECT_EQ(values(constant.series), (std::vector<double>{0, 0, 0}));
    EXPECT_TRUE(constant.params.degenerate());
    EXPECT_EQ(constant.params.min, 5.0);

    const auto c = values(minmax_scale(TimeSeries("c", {0.2, 0.6, 0.4})).series);
    EXPECT_NEAR(c[0], 0.0, 1e-15);
    EXPECT_NEAR(c[1], 1.0, 1e-15);
    EXPECT_NEAR(c[2], 0.5, 1e-15);
}

TEST(MinMaxScale, RoundTripAndRange) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng(Seed{seed});
        std::vector<double> v(1 + seed % 40);
        const double scale = std::pow(10.0, rng.uniform(-6, 6));
        for (auto &x : v) x = scale * rng.normal() + rng.uniform(-1e3, 1e3);
        const TimeSeries s("s", v);
        const auto scaled = minmax_scale(s);
        for (double x : scaled.series.values()) {
            EXPECT_GE(x, 0.0);
            EXPECT_LE(x, 1.0);
        }
        if (scaled.params.degenerate()) continue;
        const auto back = minmax_unscale(scaled.series, scaled.params);
        for (std::size_t i = 0; i < v.size(); ++i) {
            EXPECT_LE(std::abs(back[i] - v[i]), 1e-12 * std::max(std::abs(v[i]), scale)) << "seed " << seed;
        }
    }
}

TEST(MultiSeries, Invariants) {
    Eigen::MatrixXd m(2, 2);
    m << 1, 2, 3, 4;
    EXPECT_THROW(MultiSeries({"a", "a"}, m), InvalidArgument);
    EXPECT_THROW(MultiSeries({"a"}, m), InvalidArgument);
    m(0, 0) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(MultiSeries({"a", "b"}, m), InvalidArgument);
}

TEST(Split, Examples) {
    const auto a = split(ramp_panel(600, 2), SplitSpec{0.9});
    EXPECT_EQ(a.first.length(), 540u);
    EXPECT_EQ(a.second.length(), 60u);

    const auto b = split(ramp_panel(10, 1), SplitSpec{0.5});
    EXPECT_EQ(b.first.length(), 5u);
    EXPECT_EQ(b.second.length(), 5u);

    const auto c = split(ramp_panel(100, 3), SplitSpec{0.9});
    EXPECT_EQ(c.first.length(), 90u);
    EXPECT_EQ(c.second.length(), 10u);
}

TEST(Split, IsAPartition) {
    for (std::size_t t = 3; t < 60; t += 7) {
        for (double f : {0.5, 0.66, 0.9}) {
            const auto panel = ramp_panel(t, 2);
            if (static_cast<std::size_t>(std::floor(static_cast<double>(t) * f)) < 2) continue;
            const auto [train, test] = split(panel, SplitSpec{f});
            ASSERT_EQ(train.length() + test.length(), t);
            Eigen::MatrixXd joined(static_cast<Eigen::Index>(t), 2);
            joined << train.data(), test.data();
            EXPECT_EQ(joined, panel.data());
        }
    }
}

TEST(Split, TooShortPanelIsAnError) {
    EXPECT_THROW(split(ramp_panel(3, 1), SplitSpec{0.5}), InvalidArgument);
    EXPECT_THROW(split(ramp_panel(10, 1), SplitSpec{1.0}), InvalidArgument);
    EXPECT_THROW(split(ramp_panel(10, 1), SplitSpec{0.0}), InvalidArgument);
}

TEST(Rng, UniformExamples) {
    EXPECT_TRUE(rng_uniform(Seed{7}, -0.01, 0.01, 0).empty());
    EXPECT_THROW(rng_uniform(Seed{7}, 0.01, 0.01, 3), InvalidArgument);
    EXPECT_THROW(rng_uniform(Seed{7}, 1.0, 0.0, 3), InvalidArgument);

    const auto v = rng_uniform(Seed{7}, -0.01, 0.01, 100000);
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    EXPECT_LT(std::abs(mean), 3 * 5.5e-5);
    for (double x : v) {
        EXPECT_GE(x, -0.01);
        EXPECT_LT(x, 0.01);
    }
    EXPECT_EQ(v, rng_uniform(Seed{7}, -0.01, 0.01, 100000));
    EXPECT_NE(v, rng_uniform(Seed{8}, -0.01, 0.01, 100000));
}

TEST(Rng, StreamsAreDistinctAndStable) {
    Rng a(Seed{1}, 0), b(Seed{1}, 1), c(Seed{1}, 0);
    const auto x = a.next_u64();
    EXPECT_NE(x, b.next_u64());
    EXPECT_EQ(x, c.next_u64());
}

TEST(Rng, NormalMoments) {
    Rng rng(Seed{42});
    const int n = 200000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        s += z;
        s2 += z * z;
    }
    EXPECT_NEAR(s / n, 0.0, 4.0 / std::sqrt(n));
    EXPECT_NEAR(s2 / n, 1.0, 4.0 * std::sqrt(2.0 / n));
}

TEST(Rng, DeriveSeedDependsOnTag) {
    EXPECT_EQ(derive_seed(Seed{3}, "a/0.1/0"), derive_seed(Seed{3}, "a/0.1/0"));
    EXPECT_NE(derive_seed(Seed{3}, "a/0.1/0"), derive_seed(Seed{3}, "a/0.1/1"));
    EXPECT_NE(derive_seed(Seed{3}, "a/0.1/0"), derive_seed(Seed{4}, "a/0.1/0"));
}

TEST(Csv, RoundTripIsExact) {
    Eigen::MatrixXd m(3, 2);
    m << 0.1, -1e-300, 1.0 / 3.0, 12345.678, -0.0, 2e200;
    const MultiSeries panel({"x", "y"}, m);
    std::stringstream ss;
    write_panel_csv(ss, panel);
    const auto back = read_panel_csv(ss);
    EXPECT_EQ(back.names(), panel.names());
    EXPECT_EQ(back.data(), panel.data());
}

TEST(Csv, RejectsMalformedInput) {
    std::stringstream missing("a,b\n1,2\n3,\n");
    EXPECT_THROW(read_panel_csv(missing), FormatError);
    std::stringstream ragged("a,b\n1,2\n3\n");
    EXPECT_THROW(read_panel_csv(ragged), FormatError);
    std::stringstream text("a,b\n1,2\n3,x\n");
    EXPECT_THROW(read_panel_csv(text), FormatError);
    std::stringstream comma_radix("a\n1,5\n2,5\n");
    EXPECT_THROW(read_panel_csv(comma_radix), FormatError);
    std::stringstream dup("a,a\n1,2\n3,4\n");
    EXPECT_THROW(read_panel_csv(dup), FormatError);
    std::stringstream empty("");
    EXPECT_THROW(read_panel_csv(empty), FormatError);
}

TEST(Csv, QuotedCells) {
    EXPECT_EQ(split_csv_line(R"(a, "b,c" ,"say ""hi""",)"),
              (std::vector<std::string>{"a", "b,c", "say \"hi\"", ""}));
    EXPECT_THROW(split_csv_line(R"("open,1)"), FormatError);
    EXPECT_THROW(split_csv_line(R"("a"b,1)"), FormatError);
    for (const char *text : {"plain", "arima:5,0,5", "q\"uote", ""}) {
        EXPECT_EQ(split_csv_line(csv_field(text)), std::vector<std::string>{text});
    }
    Eigen::MatrixXd m(2, 2);
    m << 1, 2, 3, 4;
    const MultiSeries panel({"roi,left", "roi \"b\""}, m);
    std::stringstream ss;
    write_panel_csv(ss, panel);
    EXPECT_EQ(read_panel_csv(ss).names(), panel.names());
}

TEST(Csv, AcceptsBomAndCrlf) {
    std::stringstream ss("\xEF\xBB\xBFx,y\r\n1,2\r\n3,4\r\n");
    const auto p = read_panel_csv(ss);
    EXPECT_EQ(p.names(), (std::vector<std::string>{"x", "y"}));
    EXPECT_EQ(p.data()(1, 1), 4.0);
}

TEST(Parallel, ResultsIndependentOfJobs) {
    std::vector<double> a(257), b(257);
    parallel_for(a.size(), 1, [&](std::size_t i) { a[i] = std::sin(static_cast<double>(i)); });
    parallel_for(b.size(), 4, [&](std::size_t i) { b[i] = std::sin(static_cast<double>(i)); });
    EXPECT_EQ(a, b);
}

TEST(Parallel, RethrowsLowestFailingIndex) {
    try {
        parallel_for(100, 4, [](std::size_t i) {
            if (i == 17 || i == 60) throw std::runtime_error("fail " + std::to_string(i));
        });
        FAIL() << "expected an exception";
    } catch (const std::runtime_error &e) {
        EXPECT_STREQ(e.what(), "fail 17");
    }
}
