#include "wnls/flow.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "wnls/fft.hpp"
#include "wnls/format.hpp"

namespace wnls {

std::string to_string(FlowVariant v) {
  switch (v) {
    case FlowVariant::original:
      return "original";
    case FlowVariant::renormalized:
      return "renormalized";
    case FlowVariant::gauged_truncated:
      return "gauged-truncated";
    case FlowVariant::resonant:
      return "resonant";
    case FlowVariant::damped_control:
      return "damped-control";
  }
  return "unknown";
}

FlowVariant flow_variant_from_string(const std::string& s) {
  for (auto v : {FlowVariant::original, FlowVariant::renormalized, FlowVariant::gauged_truncated,
                 FlowVariant::resonant, FlowVariant::damped_control})
    if (to_string(v) == s) return v;
  throw std::invalid_argument("unknown flow variant '" + s + "'");
}

cplx linear_phase(std::int64_t n, long double t) {
  constexpr long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  const long double n2 = static_cast<long double>(n) * static_cast<long double>(n);
  long double arg = n2 * n2 * t;
  arg -= two_pi * std::nearbyint(arg / two_pi);
  return std::polar(1.0, -static_cast<double>(arg));
}

SpectralField linear_propagate(const SpectralField& f, double t) {
  SpectralField out = f;
  for (int n = -f.cutoff(); n <= f.cutoff(); ++n) out.at(n) *= linear_phase(n, t);
  return out;
}

SpectralField resonant_flow_exact(const SpectralField& f0, double t) {
  SpectralField out = f0;
  for (int n = -f0.cutoff(); n <= f0.cutoff(); ++n) {
    const cplx c = f0.coeff(n);
    out.at(n) = linear_phase(n, t) * std::polar(1.0, t * std::norm(c)) * c;
  }
  return out;
}

SpectralField resonant_series(const SpectralField& f0, double t, int order) {
  if (order < 0) throw std::invalid_argument("resonant_series: order must be >= 0");
  SpectralField out = f0;
  for (int n = -f0.cutoff(); n <= f0.cutoff(); ++n) {
    const cplx c = f0.coeff(n);
    const cplx x{0.0, t * std::norm(c)};
    cplx term = c;
    cplx sum = c;
    for (int k = 1; k <= order; ++k) {
      term *= x / static_cast<double>(k);
      sum += term;
    }
    out.at(n) = linear_phase(n, t) * sum;
  }
  return out;
}

//---------------------------------------------------------------------------//
// Integrator
//---------------------------------------------------------------------------//

namespace {

constexpr cplx I{0.0, 1.0};

// u' = F(t, u) in the interaction picture: the full equation is u' = L u + F with L = -i n^4.
using Rhs = std::function<void(double t, const SpectralField& u, SpectralField& out)>;

// Lawson RK4: classical RK4 on v = e^{-tL}u, written back in u.
class LawsonStepper {
 public:
  LawsonStepper(int cutoff, long double h, const Rhs& rhs)
      : h_(static_cast<double>(h)), rhs_(rhs), k1_(cutoff), k2_(cutoff), k3_(cutoff), k4_(cutoff),
        tmp_(cutoff) {
    full_.reserve(2 * cutoff + 1);
    half_.reserve(2 * cutoff + 1);
    for (int n = -cutoff; n <= cutoff; ++n) {
      full_.push_back(linear_phase(n, h));
      half_.push_back(linear_phase(n, h / 2));
    }
  }

  double h() const { return h_; }

  void step(double t, SpectralField& u) {
    auto uc = u.coeffs();
    const std::size_t m = uc.size();
    const double h = h_;
    const double h2 = h / 2;

    rhs_(t, u, k1_);
    auto a = tmp_.coeffs();
    auto k1 = k1_.coeffs();
    for (std::size_t j = 0; j < m; ++j) a[j] = half_[j] * (uc[j] + h2 * k1[j]);
    rhs_(t + h2, tmp_, k2_);
    auto k2 = k2_.coeffs();
    for (std::size_t j = 0; j < m; ++j) a[j] = half_[j] * uc[j] + h2 * k2[j];
    rhs_(t + h2, tmp_, k3_);
    auto k3 = k3_.coeffs();
    for (std::size_t j = 0; j < m; ++j) a[j] = full_[j] * uc[j] + h * half_[j] * k3[j];
    rhs_(t + h, tmp_, k4_);
    auto k4 = k4_.coeffs();
    for (std::size_t j = 0; j < m; ++j)
      uc[j] = full_[j] * uc[j] +
              (h / 6) * (full_[j] * k1[j] + 2.0 * half_[j] * (k2[j] + k3[j]) + k4[j]);
  }

 private:
  double h_;
  const Rhs& rhs_;
  std::vector<cplx> full_;
  std::vector<cplx> half_;
  SpectralField k1_, k2_, k3_, k4_, tmp_;
};

// Relative l2 gap over |n| <= active between one step of h and two of h/2.
double halving_gap(const SpectralField& u, double t, long double h, int active, const Rhs& rhs) {
  LawsonStepper big(u.cutoff(), h, rhs);
  LawsonStepper small(u.cutoff(), h / 2, rhs);
  SpectralField one = u;
  big.step(t, one);
  SpectralField two = u;
  small.step(t, two);
  small.step(t + static_cast<double>(h / 2), two);
  double num = 0.0;
  double den = 0.0;
  for (int n = -active; n <= active; ++n) {
    num += std::norm(one.coeff(n) - two.coeff(n));
    den += std::norm(u.coeff(n));
  }
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(num / den);
}

double active_mass(const SpectralField& u, int active) {
  double m = 0.0;
  for (int n = -active; n <= active; ++n) m += std::norm(u.coeff(n));
  return m;
}

struct StepPlan {
  long double h = 0;
  long steps = 0;
  long stride = 1;
};

StepPlan plan_steps(const FlowSpec& spec, double dt) {
  StepPlan p;
  if (spec.sample_interval > 0.0) {
    const double intervals = std::round(spec.t_end / spec.sample_interval);
    if (std::abs(intervals * spec.sample_interval - spec.t_end) > 1e-9 * std::max(1.0, spec.t_end))
      throw std::invalid_argument("flow: t_end must be a multiple of sample_interval");
    const long sub = std::max(1L, static_cast<long>(std::ceil(spec.sample_interval / dt - 1e-9)));
    p.h = static_cast<long double>(spec.sample_interval) / sub;
    p.steps = static_cast<long>(intervals) * sub;
    p.stride = sub;
  } else {
    p.steps = std::max(1L, static_cast<long>(std::ceil(spec.t_end / dt - 1e-9)));
    p.h = static_cast<long double>(spec.t_end) / p.steps;
    p.stride = spec.sample_stride;
  }
  return p;
}

void validate(const FlowSpec& spec, const SpectralField& f0) {
  if (f0.cutoff() != spec.cutoff)
    throw std::invalid_argument("flow: initial data cutoff " + std::to_string(f0.cutoff()) +
                                " != spec cutoff " + std::to_string(spec.cutoff));
  if (!(spec.t_end >= 0.0)) throw std::invalid_argument("flow: t_end must be >= 0");
  if (spec.dt < 0.0) throw std::invalid_argument("flow: dt must be > 0 (or 0 for automatic)");
  if (spec.sample_stride < 1) throw std::invalid_argument("flow: sample_stride must be >= 1");
  if (!(spec.step_tolerance > 0.0)) throw std::invalid_argument("flow: step_tolerance must be > 0");
  if (spec.check_every < 1) throw std::invalid_argument("flow: check_every must be >= 1");
  if (!f0.is_finite()) throw NonFiniteError("flow: initial data is not finite");
}

// Runs the step plan. Returns false when a periodic check fails in automatic mode.
bool run_plan(const SpectralField& f0, const FlowSpec& spec, const StepPlan& plan, int active,
              const Rhs& rhs, bool explicit_dt, TrajectoryRecord& rec) {
  rec.times.clear();
  rec.states.clear();
  rec.dt = static_cast<double>(plan.h);
  rec.steps = plan.steps;
  LawsonStepper stepper(f0.cutoff(), plan.h, rhs);
  SpectralField u = f0;
  rec.times.push_back(0.0);
  rec.states.push_back(u);
  for (long k = 0; k < plan.steps; ++k) {
    const double t = static_cast<double>(k * plan.h);
    if (k > 0 && k % spec.check_every == 0) {
      const double gap = halving_gap(u, t, plan.h, active, rhs);
      if (!(gap <= spec.step_tolerance)) {
        if (!explicit_dt) return false;
        throw StepSizeError("step-halving check failed at t = " + sci(t) + ": gap " + sci(gap) +
                            " > tolerance " + sci(spec.step_tolerance) + " (dt = " + sci(rec.dt) +
                            ")");
      }
    }
    stepper.step(t, u);
    if (!u.is_finite())
      throw NonFiniteError("flow: non-finite state at t = " + sci(t + rec.dt));
    const long done = k + 1;
    if (done % plan.stride == 0 || done == plan.steps) {
      rec.times.push_back(static_cast<double>(done * plan.h));
      rec.states.push_back(u);
    }
  }
  return true;
}

TrajectoryRecord integrate(const SpectralField& f0, const FlowSpec& spec, int active, const Rhs& rhs) {
  TrajectoryRecord rec;
  rec.spec = spec;
  if (spec.t_end == 0.0) {
    rec.times.push_back(0.0);
    rec.states.push_back(f0);
    return rec;
  }
  if (spec.dt > 0.0) {
    const StepPlan plan = plan_steps(spec, spec.dt);
    const double gap = halving_gap(f0, 0.0, plan.h, active, rhs);
    if (!(gap <= spec.step_tolerance))
      throw StepSizeError("step-halving check failed at t = 0: gap " + sci(gap) + " > tolerance " +
                          sci(spec.step_tolerance) + " (dt = " + sci(static_cast<double>(plan.h)) +
                          ")");
    run_plan(f0, spec, plan, active, rhs, true, rec);
    return rec;
  }
  double dt = std::min(1e-2, 0.5 / (1.0 + active_mass(f0, active)));
  constexpr int kMaxHalvings = 40;
  for (int attempt = 0; attempt < kMaxHalvings; ++attempt, dt /= 2) {
    const StepPlan plan = plan_steps(spec, dt);
    if (!(halving_gap(f0, 0.0, plan.h, active, rhs) <= spec.step_tolerance / 4)) continue;
    if (run_plan(f0, spec, plan, active, rhs, false, rec)) return rec;
  }
  throw StepSizeError("no step size passed the halving check (tolerance " +
                      sci(spec.step_tolerance) + ")");
}

// pi_N(|u|^2 u) on the field's own cutoff.
void cube_into(const SpectralField& u, SpectralField& out) {
  thread_cubic_workspace(u.cutoff()).cube(u, out);
}

Rhs make_rhs(const FlowSpec& spec, const GaussianEnsemble* e) {
  switch (spec.variant) {
    case FlowVariant::original:
      return [](double, const SpectralField& u, SpectralField& out) {
        cube_into(u, out);
        out *= -I;
      };
    case FlowVariant::renormalized:
      return [](double, const SpectralField& u, SpectralField& out) {
        cube_into(u, out);
        const double m2 = 2.0 * u.mass();
        auto o = out.coeffs();
        auto c = u.coeffs();
        for (std::size_t j = 0; j < o.size(); ++j) o[j] = -I * (o[j] - m2 * c[j]);
      };
    case FlowVariant::resonant:
      return [](double, const SpectralField& u, SpectralField& out) {
        auto o = out.coeffs();
        auto c = u.coeffs();
        for (std::size_t j = 0; j < o.size(); ++j) o[j] = I * std::norm(c[j]) * c[j];
      };
    case FlowVariant::damped_control: {
      const double gamma = spec.damping;
      return [gamma](double, const SpectralField& u, SpectralField& out) {
        cube_into(u, out);
        const double m2 = 2.0 * u.mass();
        auto o = out.coeffs();
        auto c = u.coeffs();
        for (std::size_t j = 0; j < o.size(); ++j) o[j] = -I * (o[j] - m2 * c[j]) - gamma * o[j];
      };
    }
    case FlowVariant::gauged_truncated: {
      if (!e) throw std::invalid_argument("flow: gauged-truncated variant needs an ensemble");
      const int N = spec.cutoff;
      if (e->cutoff() < N)
        throw std::invalid_argument("flow: ensemble cutoff " + std::to_string(e->cutoff()) +
                                    " does not cover flow cutoff " + std::to_string(N));
      std::vector<double> g2;
      for (int n = -N; n <= N; ++n) g2.push_back(e->intensity(n, N));
      // i w_t = n^4 w + e^{-it|g|^2} N(u) + |g|^2 w with u_n = e^{it|g|^2} w_n.
      // RK4 asks for each stage time twice in a row (t + h/2, and t + h as the
      // next step's t), so the two most recent phase vectors are kept.
      struct PhaseCache {
        double t = std::numeric_limits<double>::quiet_NaN();
        std::vector<cplx> rot;
      };
      return [g2 = std::move(g2), N, cache = std::array<PhaseCache, 2>{}, next = 0,
              u = SpectralField(N)](double t, const SpectralField& w, SpectralField& out) mutable {
        const std::vector<cplx>* rot = nullptr;
        for (const auto& c : cache)
          if (c.t == t) rot = &c.rot;
        if (!rot) {
          auto& c = cache[static_cast<std::size_t>(next)];
          next ^= 1;
          c.t = t;
          c.rot.resize(g2.size());
          for (std::size_t j = 0; j < g2.size(); ++j) c.rot[j] = std::polar(1.0, t * g2[j]);
          rot = &c.rot;
        }
        auto uc = u.coeffs();
        auto wc = w.coeffs();
        for (std::size_t j = 0; j < uc.size(); ++j) uc[j] = (*rot)[j] * wc[j];
        cube_into(u, out);
        const double m2 = 2.0 * u.mass();
        auto o = out.coeffs();
        for (std::size_t j = 0; j < o.size(); ++j)
          o[j] = -I * (std::conj((*rot)[j]) * (o[j] - m2 * uc[j]) + g2[j] * wc[j]);
      };
    }
  }
  throw std::logic_error("flow: unhandled variant");
}

}  // namespace

TrajectoryRecord evolve_truncated(const SpectralField& f0, const FlowSpec& spec,
                                  const GaussianEnsemble* ensemble) {
  validate(spec, f0);
  const Rhs rhs = make_rhs(spec, ensemble);
  TrajectoryRecord rec = integrate(f0, spec, spec.cutoff, rhs);
  if (ensemble) rec.ensemble = *ensemble;
  return rec;
}

double initial_step(const SpectralField& f0, const FlowSpec& spec, const GaussianEnsemble* ensemble) {
  validate(spec, f0);
  const Rhs rhs = make_rhs(spec, ensemble);
  double dt = std::min(1e-2, 0.5 / (1.0 + active_mass(f0, spec.cutoff)));
  for (int attempt = 0; attempt < 40; ++attempt, dt /= 2)
    if (halving_gap(f0, 0.0, dt, spec.cutoff, rhs) <= spec.step_tolerance / 4) return dt;
  throw StepSizeError("no step size passed the halving check (tolerance " + sci(spec.step_tolerance) + ")");
}

TrajectoryRecord evolve_extended(const SpectralField& f0, int inner, const FlowSpec& spec) {
  validate(spec, f0);
  if (inner < 0 || inner > f0.cutoff())
    throw std::invalid_argument("evolve_extended: need 0 <= inner <= cutoff");
  if (spec.variant == FlowVariant::gauged_truncated)
    throw std::invalid_argument("evolve_extended: gauged variant not supported");
  FlowSpec inner_spec = spec;
  inner_spec.cutoff = inner;
  const Rhs low = make_rhs(inner_spec, nullptr);
  const int N = f0.cutoff();
  const Rhs rhs = [&low, inner, N](double t, const SpectralField& u, SpectralField& out) {
    SpectralField ul(inner);
    for (int n = -inner; n <= inner; ++n) ul.at(n) = u.coeff(n);
    SpectralField ol(inner);
    low(t, ul, ol);
    out = SpectralField(N);
    for (int n = -inner; n <= inner; ++n) out.at(n) = ol.coeff(n);
  };
  return integrate(f0, spec, inner, rhs);
}

TrajectoryRecord gauge_deterministic(const TrajectoryRecord& u, GaugeDirection dir) {
  TrajectoryRecord out = u;
  const double sign = dir == GaugeDirection::forward ? 1.0 : -1.0;
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double t = out.times[k];
    out.states[k] *= std::polar(1.0, sign * 2.0 * t * u.states[k].mass());
  }
  return out;
}

SpectralField gauge_random(const SpectralField& u, double t, const GaussianEnsemble& e,
                           int phase_cutoff, GaugeDirection dir) {
  const int need = phase_cutoff < 0 ? u.cutoff() : std::min(phase_cutoff, u.cutoff());
  if (e.cutoff() < need)
    throw std::invalid_argument("gauge_random: ensemble cutoff " + std::to_string(e.cutoff()) +
                                " does not cover modes up to " + std::to_string(need));
  const double sign = dir == GaugeDirection::forward ? -1.0 : 1.0;
  SpectralField out = u;
  for (int n = -need; n <= need; ++n) out.at(n) *= std::polar(1.0, sign * t * e.intensity(n));
  return out;
}

TrajectoryRecord gauge_random(const TrajectoryRecord& u, const GaussianEnsemble& e, int phase_cutoff,
                              GaugeDirection dir) {
  TrajectoryRecord out = u;
  for (std::size_t k = 0; k < out.size(); ++k)
    out.states[k] = gauge_random(u.states[k], u.times[k], e, phase_cutoff, dir);
  return out;
}

}  // namespace wnls
