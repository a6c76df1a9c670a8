#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "wnls/config.hpp"
#include "wnls/experiments.hpp"
#include "wnls/io.hpp"
#include "wnls/moments.hpp"
#include "wnls/random.hpp"
#include "wnls/report.hpp"
#include "wnls/stats.hpp"

using namespace wnls;

namespace {

// E[prod_i g_{x_i} prod_j conj(g_{y_j})] for iid standard complex Gaussians is the
// permanent of the 0/1 matrix [x_i == y_j] (Wick). Bitmask DP over the y side.
double wick(const std::vector<int>& x, const std::vector<int>& y) {
  if (x.size() != y.size()) return 0.0;
  const std::size_t n = x.size();
  std::vector<double> dp(std::size_t{1} << n, 0.0);
  dp[0] = 1.0;
  for (std::size_t mask = 0; mask < dp.size(); ++mask) {
    if (dp[mask] == 0.0) continue;
    const auto i = static_cast<std::size_t>(__builtin_popcountll(mask));
    if (i == n) continue;
    for (std::size_t j = 0; j < n; ++j)
      if (!(mask >> j & 1) && x[i] == y[j]) dp[mask | std::size_t{1} << j] += dp[mask];
  }
  return dp.back();
}

// E|Sigma|^2 by expanding every product into plain and conjugated Gaussian lists.
double wick_second_moment(const MomentSpec& spec) {
  double norm = 1.0;
  for (int k : spec.k) norm *= std::tgamma(k + 1.0);
  double total = 0.0;
  for (const auto& a : spec.terms)
    for (const auto& b : spec.terms) {
      std::vector<int> plain, conj;
      const int ma[3] = {a.n1, a.n2, a.n3}, mb[3] = {b.n1, b.n2, b.n3};
      for (int j = 0; j < 3; ++j) {
        if (!spec.in_set[j]) continue;
        // |g|^{2k} g (or conj g at j = 2) from the term a, and its conjugate from b.
        const int k = spec.k[j];
        for (int r = 0; r < k + (j != 1); ++r) plain.push_back(ma[j]);
        for (int r = 0; r < k + (j == 1); ++r) conj.push_back(ma[j]);
        for (int r = 0; r < k + (j != 1); ++r) conj.push_back(mb[j]);
        for (int r = 0; r < k + (j == 1); ++r) plain.push_back(mb[j]);
      }
      total += (a.c * std::conj(b.c)).real() * wick(plain, conj);
    }
  return total / (norm * norm);
}

MomentSpec moment_case(int n, int box, std::array<bool, 3> in_set, std::array<int, 3> k, std::uint64_t seed) {
  MomentSpec s;
  s.in_set = in_set;
  s.k = k;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  for (int n1 = -box; n1 <= box; ++n1)
    for (int n3 = -box; n3 <= box; ++n3) {
      const int n2 = n1 + n3 - n;
      if (std::abs(n2) > box || n1 == n || n3 == n) continue;
      s.terms.push_back({n1, n2, n3, {g(rng), g(rng)}});
    }
  return s;
}

}  // namespace

TEST_SUITE("stats") {
  TEST_CASE("KS p-values are uniform under the null") {
    std::vector<double> pe, pu;
    CounterStream rng(4, 0);
    for (int r = 0; r < 400; ++r) {
      std::vector<double> x(50), u(50);
      for (auto& v : x) v = -std::log(rng.uniform());
      for (auto& v : u) v = rng.uniform();
      pe.push_back(ks_exp1(x).p_value);
      pu.push_back(ks_uniform(u).p_value);
    }
    CHECK(ks_uniform(pe).p_value > 1e-3);
    CHECK(ks_uniform(pu).p_value > 1e-3);
  }

  TEST_CASE("KS detects a wrong distribution") {
    std::vector<double> x;
    for (int i = 0; i < 500; ++i) x.push_back(2.0 * (i + 0.5) / 500);  // U(0, 2), not Exp(1)
    CHECK(ks_exp1(x).p_value < 1e-6);
  }

  TEST_CASE("Kolmogorov tail at the classical critical values") {
    const std::size_t n = 1000000;
    CHECK(kolmogorov_pvalue(1.3581 / std::sqrt(double(n)), n) == doctest::Approx(0.05).epsilon(2e-3));
    CHECK(kolmogorov_pvalue(1.6276 / std::sqrt(double(n)), n) == doctest::Approx(0.01).epsilon(2e-3));
    CHECK(kolmogorov_pvalue(0.0, 10) == 1.0);
    CHECK(kolmogorov_pvalue(1.0, 10) < 1e-8);  // about 2 exp(-2 * 10)
  }

  TEST_CASE("Benjamini-Hochberg") {
    CHECK(benjamini_hochberg({0.01, 0.04, 0.03, 0.005}, 0.05) == std::vector<bool>{true, true, true, true});
    CHECK(benjamini_hochberg({0.02, 0.5, 0.03}, 0.05) == std::vector<bool>{true, false, true});
    CHECK(benjamini_hochberg({0.02, 0.5, 0.04}, 0.05) == std::vector<bool>{false, false, false});
  }

  TEST_CASE("slope fit, correlation and quantiles") {
    const SlopeFit f = slope_fit({1, 2, 3, 4}, {3, 5, 7, 9});
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.slope_se == doctest::Approx(0.0));
    CHECK(pearson({1, 2, 3}, {3, 2, 1}) == doctest::Approx(-1.0));
    CHECK(quantile({4, 1, 3, 2}, 0.25) == doctest::Approx(1.75));
    CHECK(median({5, 1, 3}) == 3.0);
    CHECK(mean({1, 2, 6}) == 3.0);
    CHECK(std_error({1, 3}) == doctest::Approx(1.0));
  }

  TEST_CASE("degenerate samples throw") {
    CHECK_THROWS_AS(slope_fit({1, 1, 1}, {1, 2, 3}), DegenerateSample);
    CHECK_THROWS_AS(slope_fit({1}, {1}), DegenerateSample);
    CHECK_THROWS_AS(pearson({1, 2}, {5, 5}), DegenerateSample);
    CHECK_THROWS_AS(pearson({1, 2}, {1, 2, 3}), DegenerateSample);
    CHECK_THROWS_AS(ks_uniform({0.5}), DegenerateSample);
  }
}

TEST_SUITE("report") {
  TEST_CASE("verdict comparisons") {
    CHECK(make_verdict("a", 1.0, "<", 2.0).passed);
    CHECK_FALSE(make_verdict("a", 2.0, "<", 2.0).passed);
    CHECK(make_verdict("a", 2.0, "<=", 2.0).passed);
    CHECK(make_verdict("a", 3.0, ">", 2.0).passed);
    CHECK(make_verdict("a", 2.0, ">=", 2.0).passed);
    CHECK(make_verdict("a", 0.0, "==", 0.0).passed);
    CHECK(make_verdict("a", 1.05, "in", 0.9, 1.1).passed);
    CHECK_FALSE(make_verdict("a", 1.2, "in", 0.9, 1.1).passed);
    CHECK_FALSE(make_verdict("a", std::nan(""), "<", 1.0).passed);
    CHECK_THROWS(make_verdict("a", 1.0, "!=", 1.0));
  }

  TEST_CASE("number formatting") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(-2.5e-300) == "-2.5e-300");
    CHECK(format_double(std::nan("")) == "nan");
    CHECK(format_double(-INFINITY) == "-inf");
    CHECK(std::stod(format_double(M_PI)) == M_PI);
    CHECK(json_number(INFINITY).is_string());
    CHECK(json_number(1.5).is_number());
  }

  TEST_CASE("report passes only with verdicts, all passing") {
    ExperimentReport r;
    CHECK_FALSE(r.passed());
    r.verdicts.push_back(make_verdict("x", 1.0, "<", 2.0));
    CHECK(r.passed());
    r.verdicts.push_back(make_verdict("y", 3.0, "<", 2.0));
    CHECK_FALSE(r.passed());
    r.cells.header = {"a", "b"};
    r.cells.add({"1", "2"});
    CHECK(r.cells.to_string() == "a,b\n1,2\n");
    CHECK_THROWS(r.cells.add({"1"}));
    CHECK(r.to_json()["verdicts"].size() == 2);
  }
}

TEST_SUITE("config") {
  TEST_CASE("text round trip for every command") {
    for (const auto& cmd : known_commands()) {
      RunConfig c(cmd);
      c.set("run.seed", "99");
      const RunConfig back = RunConfig::parse(c.to_text());
      CHECK(back == c);
      CHECK(back.seed() == 99);
    }
  }

  TEST_CASE("comments, whitespace and overrides") {
    const RunConfig c = RunConfig::parse("# comment\nrun.command = evolve\n  evolve.N=8  # trailing\nevolve.variant = original\n");
    CHECK(c.get_int("evolve.N") == 8);
    CHECK(c.get("evolve.variant") == "original");
    CHECK(c.get_double("evolve.t") == 0.1);
  }

  TEST_CASE("bad input is rejected with the key named") {
    RunConfig c("study");
    CHECK_THROWS_AS(c.set("study.bogus", "1"), ConfigError);
    CHECK_THROWS_AS(c.set("evolve.N", "1"), ConfigError);
    CHECK_THROWS_AS(c.set("study.samples", "-3"), ConfigError);
    CHECK_THROWS_AS(c.set("study.delta", "abc"), ConfigError);
    CHECK_THROWS_AS(c.set("study.kind", "nonsense"), ConfigError);
    CHECK_THROWS_AS(c.set("run.out", "a#b"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse("study.kind = invariance\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse("run.command = launch\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse("run.command = study\nno equals sign\n"), ConfigError);
    try {
      c.set("study.delta", "abc");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("study.delta") != std::string::npos);
    }
  }

  TEST_CASE("lists") {
    RunConfig c("study");
    c.set("study.N", "8, 16,32");
    c.set("study.t", "0.25,1");
    CHECK(c.get_ints("study.N") == std::vector<int>{8, 16, 32});
    CHECK(c.get_doubles("study.t") == std::vector<double>{0.25, 1.0});
    CHECK_THROWS_AS(c.set("study.N", "8,x"), ConfigError);
  }

  TEST_CASE("study spec resolution") {
    RunConfig c("study");
    c.set("study.kind", "z1-scaling");
    c.set("study.samples", "7");
    c.set("run.seed", "5");
    const StudySpec s = study_spec_from(c);
    StudySpec want = StudySpec::defaults(StudyKind::z1_scaling);
    want.samples = 7;
    want.seed = 5;
    CHECK(s.to_json() == want.to_json());
  }
}

TEST_SUITE("io") {
  TEST_CASE("hashes") {
    CHECK(sha1_hex("abc") == "a9993e364706816aba3e25717850c26c9cd0d89d");
    CHECK(sha1_hex("") == "da39a3ee5e6b4b0d3255bfef95601890afd80709");
    // `printf 'hello\n' | git hash-object --stdin`
    CHECK(git_blob_hash("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
  }

  TEST_CASE("files and artifacts") {
    const auto dir = std::filesystem::temp_directory_path() / "wnls_io_test" / "nested";
    std::filesystem::remove_all(dir.parent_path());
    const std::string bytes("a\0b\r\n", 5);
    write_file(dir / "x.bin", bytes);
    CHECK(read_file(dir / "x.bin") == bytes);
    std::filesystem::remove_all(dir.parent_path());

    const RunConfig cfg("sample");
    const auto p = provenance(cfg);
    CHECK(p["config_hash"] == git_blob_hash(cfg.to_text()));
    CHECK(p["config"]["sample.N"] == "16");
    CHECK(field_csv(SpectralField::single_mode(1, 0, {1.5, -2})) == "n,re,im\n-1,0,0\n0,1.5,-2\n1,0,0\n");
  }
}

TEST_SUITE("moments") {
  TEST_CASE("exact pairing agrees with the Wick permanent") {
    struct Case {
      std::array<bool, 3> in;
      std::array<int, 3> k;
    };
    const Case cases[] = {{{true, true, true}, {0, 0, 0}}, {{true, true, true}, {1, 0, 0}},
                          {{true, false, true}, {0, 0, 1}}, {{true, true, true}, {1, 1, 0}},
                          {{false, true, false}, {0, 2, 0}}, {{true, true, false}, {0, 1, 0}}};
    std::uint64_t seed = 1;
    for (const auto& c : cases)
      for (int n : {0, 1}) {
        const MomentSpec spec = moment_case(n, 2, c.in, c.k, seed++);
        CHECK(second_moment_exact(spec) == doctest::Approx(wick_second_moment(spec)).epsilon(1e-12));
      }
  }

  TEST_CASE("Monte Carlo is within three standard errors and below the bound") {
    const MomentSpec spec = moment_case(1, 2, {true, true, true}, {1, 0, 0}, 3);
    const MomentEstimate m = multilinear_second_moment(spec, 20000, 17);
    CHECK(std::abs(m.mean - m.exact) < 3 * m.std_error);
    CHECK(m.exact <= m.bound);
  }

  TEST_CASE("invalid specs are rejected") {
    MomentSpec bad = moment_case(0, 2, {true, true, true}, {0, 0, 0}, 1);
    bad.terms.push_back({1, 1, 0, 1.0});  // n1 = n2 -> off Gamma
    CHECK_THROWS(bad.validate());
    MomentSpec deep = moment_case(0, 2, {true, true, true}, {4, 0, 0}, 1);
    CHECK_THROWS(deep.validate());
  }
}

TEST_SUITE("experiments") {
  TEST_CASE("kind names round trip") {
    for (auto k : {StudyKind::invariance, StudyKind::convergence, StudyKind::residual, StudyKind::z1_scaling,
                   StudyKind::cancellation, StudyKind::functional_tails})
      CHECK(study_kind_from_string(to_string(k)) == k);
    CHECK_THROWS(study_kind_from_string("z2"));
  }

  TEST_CASE("defaults validate and bad fields are named") {
    for (auto k : {StudyKind::invariance, StudyKind::convergence, StudyKind::residual, StudyKind::z1_scaling,
                   StudyKind::cancellation, StudyKind::functional_tails})
      CHECK_NOTHROW(StudySpec::defaults(k).validate());
    StudySpec s = StudySpec::defaults(StudyKind::residual);
    s.samples = 0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = StudySpec::defaults(StudyKind::invariance);
    s.fdr_q = 1.5;
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("fdr_q"), std::invalid_argument);
    s = StudySpec::defaults(StudyKind::z1_scaling);
    s.kind = StudyKind::cancellation;
    CHECK_THROWS(run_z1_scaling(s));
  }

  TEST_CASE("single mode: block norm and degenerate fit") {
    const double delta = 0.1;
    const auto norms = resonant_block_norms(SpectralField::single_mode(15, 5, {0.6, 0.8}), delta, 3);
    REQUIRE(norms.size() == 4);
    CHECK(norms[0] == 0.0);
    CHECK(norms[1] == 0.0);
    CHECK(norms[2] == doctest::Approx(std::pow(2 * delta, 0.25)).epsilon(1e-12));
    CHECK(norms[3] == 0.0);
    CHECK_THROWS_AS(fit_block_scaling(norms), DegenerateSample);
  }

  TEST_CASE("block scaling slope") {
    std::vector<double> norms;
    for (int k = 0; k < 6; ++k) norms.push_back(3.0 * std::pow(2.0, 0.25 * k));
    CHECK(fit_block_scaling(norms).slope == doctest::Approx(0.25));
  }

  TEST_CASE("white-noise tail mass at s = -1 has a closed form") {
    // sum_{n >= 1} 1/(1 + n^2) = (pi coth pi - 1)/2.
    const double full = (M_PI / std::tanh(M_PI) - 1.0) / 2.0;
    for (int N : {0, 5, 100, 5000}) {
      double head = 0.0;
      for (int n = 1; n <= N; ++n) head += 1.0 / (1.0 + double(n) * n);
      CHECK(white_noise_tail_mass(N, -1.0) == doctest::Approx(2.0 * (full - head)).epsilon(1e-9));
    }
    CHECK(std::isinf(white_noise_tail_mass(10, -0.5)));
  }

  TEST_CASE("studies are reproducible and independent of the thread count") {
    StudySpec s = StudySpec::defaults(StudyKind::z1_scaling);
    s.cutoffs = {64};
    s.samples = 6;
    const std::string a = dump_json(run_study(s).to_json());
#ifdef _OPENMP
    const int before = omp_get_max_threads();
    omp_set_num_threads(before > 1 ? 1 : 3);
#endif
    const std::string b = dump_json(run_study(s).to_json());
#ifdef _OPENMP
    omp_set_num_threads(before);
#endif
    CHECK(a == b);
    s.seed = 2;
    CHECK(dump_json(run_study(s).to_json()) != a);
  }

  TEST_CASE("invariance holds exactly at t = 0") {
    StudySpec s = StudySpec::defaults(StudyKind::invariance);
    s.times = {0.0};
    s.control_samples = 0;
    const ExperimentReport r = run_invariance(s);
    for (const auto& v : r.verdicts) CHECK_MESSAGE(v.passed, v.name, " = ", v.statistic);
    CHECK(r.passed());
  }
}
