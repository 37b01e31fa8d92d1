#ifndef CBLB_DIAGNOSTICS_HPP
#define CBLB_DIAGNOSTICS_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cblb/solver.hpp"

namespace cblb {

// ---------------------------------------------------------------------------
// Sheared-frame geometry: kappa = dz(V)/dy(V) with V = y + u10_hat, and the
// rho coefficients that express grad(kappa) through grad(V) and the good
// derivative dz - kappa*dy.
// ---------------------------------------------------------------------------

/// kappa, rho1, rho2 are stored on the full spectral band (no dealiasing):
/// the defining relations are algebraic at collocation points, and keeping
/// the exact collocation values is what makes them hold to roundoff.
struct KappaBundle {
    SpectralField v_hat;  ///< streak part of V; the affine y term is implicit
    SpectralField kappa;
    SpectralField rho1, rho2;
    double floor_margin = 0.0;  ///< min over collocation of 1 + dy(u10_hat)
};

inline KappaBundle kappa_bundle(const SpectralField& u10_hat, double delta_floor = 0.5) {
    const Grid& g = u10_hat.grid();
    ShearClock clk{0.0, 0.0};  // zero-mode fields carry no shear phase
    std::vector<double> dy = to_physical(derivative(u10_hat, Axis::y, clk));
    std::vector<double> dz = to_physical(derivative(u10_hat, Axis::z, clk));

    double floor = 1e300;
    for (double v : dy) floor = std::min(floor, 1.0 + v);
    if (floor < delta_floor)
        throw singular_frame_error("kappa_bundle: min(1 + dy u_hat) = " +
                                   std::to_string(floor) + " below floor " +
                                   std::to_string(delta_floor));

    std::size_t n = g.size();
    std::vector<double> kap(n);
    for (std::size_t i = 0; i < n; ++i) kap[i] = dz[i] / (1.0 + dy[i]);

    SpectralField kappa = to_spectral(kap, g);
    std::vector<double> kdy = to_physical(derivative(kappa, Axis::y, clk));
    std::vector<double> kdz = to_physical(derivative(kappa, Axis::z, clk));
    std::vector<double> r1(n), r2(n);
    for (std::size_t i = 0; i < n; ++i) {
        double denom = 1.0 + kap[i] * kap[i];
        r1[i] = (kdy[i] + kap[i] * kdz[i]) / ((1.0 + dy[i]) * denom);
        r2[i] = (kdz[i] - kap[i] * kdy[i]) / denom;
    }

    KappaBundle b;
    b.v_hat = u10_hat;
    b.kappa = std::move(kappa);
    b.rho1 = to_spectral(r1, g);
    b.rho2 = to_spectral(r2, g);
    b.floor_margin = floor;
    return b;
}

/// (dz - kappa*dy) f, with the kappa product formed at collocation points.
inline SpectralField good_derivative(const SpectralField& f, const KappaBundle& b,
                                     const ShearClock& clock) {
    SpectralField dz = derivative(f, Axis::z, clock);
    SpectralField dy = derivative(f, Axis::y, clock);
    return dz - product(b.kappa, dy);
}

/// Q = u2_neq + kappa*u3_neq, with any zero-mode residue of the product removed.
inline SpectralField q_field(const State& st, const KappaBundle& b) {
    SpectralField u2n = project_nonzero(st.u2);
    SpectralField u3n = project_nonzero(st.u3);
    return project_nonzero(u2n + product(b.kappa, u3n));
}

/// omega2 = dz(u1) - dx(u3).
inline SpectralField vorticity2(const State& st, const ShearClock& clock) {
    return derivative(st.u1, Axis::z, clock) - derivative(st.u3, Axis::x, clock);
}

// ---------------------------------------------------------------------------
// Running space-time norms.
// ---------------------------------------------------------------------------

namespace detail {

/// Tracks sup_t v(t) and the trapezoid integral of v(t)^2.
struct RunningNorm {
    double sup = 0.0;
    double integral2 = 0.0;
    double prev_t = 0.0;
    double prev_v2 = 0.0;
    bool started = false;

    void add(double t, double v) {
        if (started && t < prev_t - 1e-12)
            throw clock_error("accumulator: time went backwards (" + std::to_string(t) +
                              " after " + std::to_string(prev_t) + ")");
        sup = std::max(sup, v);
        if (started) integral2 += 0.5 * (t - prev_t) * (v * v + prev_v2);
        prev_t = t;
        prev_v2 = v * v;
        started = true;
    }
};

}  // namespace detail

/// Space-time norm accumulator.  Y0 combines a sup-in-time L2 norm with the
/// viscous dissipation integral; Xa additionally weights by exp(a nu^{1/3} t)
/// and tracks the conjugate term |grad inv-laplacian dx f|.
struct NormAccumulator {
    enum class Kind { y0, xa };
    Kind kind = Kind::y0;
    double nu = 0.0;
    double a = 0.0;  // exponential weight rate (Xa only)

    detail::RunningNorm sup_part;   // weighted |f|
    detail::RunningNorm conj_part;  // weighted |grad inv-lap dx f|   (Xa only)
    detail::RunningNorm l2_part;    // weighted |f|                   (Xa only)
    detail::RunningNorm grad_part;  // weighted |grad f|

    static NormAccumulator y0(double nu) {
        NormAccumulator n;
        n.kind = Kind::y0;
        n.nu = nu;
        return n;
    }
    static NormAccumulator xa(double nu, double a) {
        NormAccumulator n;
        n.kind = Kind::xa;
        n.nu = nu;
        n.a = a;
        return n;
    }

    double weight(double t) const {
        return kind == Kind::xa ? std::exp(a * std::cbrt(nu) * t) : 1.0;
    }

    /// Feed raw instantaneous norms (unweighted); mult scales the field
    /// itself (used for time-dependent field weights).
    void add_raw(double t, double f_l2, double grad_l2, double conj_l2 = 0.0,
                 double mult = 1.0) {
        double w = weight(t) * mult;
        sup_part.add(t, w * f_l2);
        grad_part.add(t, w * grad_l2);
        if (kind == Kind::xa) {
            conj_part.add(t, w * conj_l2);
            l2_part.add(t, w * f_l2);
        }
    }

    void add_sample(double t, const SpectralField& f, const ShearClock& clock,
                    double mult = 1.0) {
        double conj = 0.0;
        if (kind == Kind::xa) {
            SpectralField dx = derivative(f, Axis::x, clock);
            conj = grad_l2_norm(inverse_laplacian(dx, clock), clock);
        }
        add_raw(t, l2_norm(f), grad_l2_norm(f, clock), conj, mult);
    }

    double value2() const {
        double v = sup_part.sup * sup_part.sup + nu * grad_part.integral2;
        if (kind == Kind::xa)
            v += conj_part.integral2 + std::cbrt(nu) * l2_part.integral2;
        return v;
    }
    double value() const { return std::sqrt(value2()); }
};

// ---------------------------------------------------------------------------
// The energy functionals E1..E7 as running accumulators.
// ---------------------------------------------------------------------------

struct EnergyReport {
    double e11 = 0, e12 = 0, e1 = 0;
    double e2 = 0, e3 = 0;
    double e41 = 0, e42 = 0, e4 = 0;
    double e5 = 0, e6 = 0, e7 = 0;
    bool frame_singular = false;

    struct Condition {
        std::string name;
        double value = 0, threshold = 0, margin = 0;  // margin = value/threshold
        bool ok = true;
    };
    std::vector<Condition> bootstrap;
    bool bootstrap_ok = true;
};

class EnergyTracker {
  public:
    EnergyTracker() = default;
    explicit EnergyTracker(const Params& p)
        : nu_(p.nu),
          a_(p.a),
          b_(p.b),
          eps0_(p.eps0),
          e2_lap_u20_(NormAccumulator::y0(p.nu)),
          e2_u30_(NormAccumulator::y0(p.nu)),
          e2_grad_u30_(NormAccumulator::y0(p.nu)),
          e2_weighted_lap_u30_(NormAccumulator::y0(p.nu)),
          e3_theta0_(NormAccumulator::y0(p.nu)),
          e3_grad_theta0_(NormAccumulator::y0(p.nu)),
          e3_dz_grad_theta0_(NormAccumulator::y0(p.nu)),
          e41_lap_u2_(NormAccumulator::xa(p.nu, p.a)),
          e41_dxz_u3_(NormAccumulator::xa(p.nu, p.a)),
          e5_dxx_theta_(NormAccumulator::xa(p.nu, p.b)),
          e5_dzz_theta_(NormAccumulator::xa(p.nu, p.a)),
          e6_dxx_u2_(NormAccumulator::xa(p.nu, p.b)),
          e6_dxx_u3_(NormAccumulator::xa(p.nu, p.b)),
          e7_dxx_u2_(NormAccumulator::xa(p.nu, p.b)),
          e7_dxx_u3_(NormAccumulator::xa(p.nu, p.b)),
          e7_good_u2_(NormAccumulator::xa(p.nu, p.b)),
          e7_good_u3_(NormAccumulator::xa(p.nu, p.b)),
          e7_grad_q_(NormAccumulator::xa(p.nu, p.b)) {}

    double nu() const { return nu_; }
    double eps0() const { return eps0_; }
    bool frame_singular() const { return frame_singular_; }
    double last_time() const { return last_t_; }

    void add_sample(const State& st, const Params& params) {
        const ShearClock& clk = st.clock;
        const ShearClock zero{clk.t, 0.0};  // zero-mode fields see no shear phase
        double t = clk.t;
        double nu13 = std::cbrt(nu_);

        // --- E1: the streak split of u1 ---
        const SpectralField& uh = st.u10_hat;
        e11_sup_.add(t, sobolev_norm(uh, 4, zero));
        e11_grad_.add(t, grad_sobolev(uh, 4, zero));
        e11_dt_.add(t, sobolev_norm(u10_hat_time_derivative(st, params), 2, zero));
        const SpectralField& ut = st.u10_tilde;
        e12_sup_.add(t, sobolev_norm(ut, 2, zero));
        e12_grad_.add(t, grad_sobolev(ut, 2, zero));

        // --- E2 / E3: zero modes ---
        SpectralField u20 = project_zero(st.u2), u30 = project_zero(st.u3);
        SpectralField th0 = project_zero(st.theta);
        e2_lap_u20_.add_sample(t, laplacian(u20, zero), zero);
        e2_u30_.add_sample(t, u30, zero);
        add_grad_sample(e2_grad_u30_, t, u30, zero);
        double tw = std::sqrt(std::min(std::pow(nu_, 2.0 / 3.0) + nu_ * t, 1.0));
        e2_weighted_lap_u30_.add_sample(t, laplacian(u30, zero), zero, tw);
        e3_theta0_.add_sample(t, th0, zero);
        add_grad_sample(e3_grad_theta0_, t, th0, zero);
        add_grad_sample(e3_dz_grad_theta0_, t, derivative(th0, Axis::z, zero), zero);

        // --- E4: nonzero velocity modes ---
        SpectralField u2n = project_nonzero(st.u2), u3n = project_nonzero(st.u3);
        e41_lap_u2_.add_sample(t, laplacian(u2n, clk), clk);
        SpectralField dxz = derivative(derivative(u3n, Axis::x, clk), Axis::x, clk) +
                            derivative(derivative(u3n, Axis::z, clk), Axis::z, clk);
        e41_dxz_u3_.add_sample(t, dxz, clk);
        SpectralField w2 = project_nonzero(vorticity2(st, clk));
        double ew = std::exp(a_ * nu13 * t);
        e42_grad_.add(t, ew * grad_l2_norm(w2, clk));
        e42_lap_.add(t, ew * l2_norm(laplacian(w2, clk)));

        // --- E5 / E6: nonzero scalar and velocity with x-derivatives ---
        SpectralField thn = project_nonzero(st.theta);
        e5_dxx_theta_.add_sample(t, dxx(thn, clk), clk);
        e5_dzz_theta_.add_sample(
            t, derivative(derivative(thn, Axis::z, clk), Axis::z, clk), clk);
        e6_dxx_u2_.add_sample(t, dxx(u2n, clk), clk);
        e6_dxx_u3_.add_sample(t, dxx(u3n, clk), clk);

        // --- E7: kappa-weighted quantities (suspended on a singular frame) ---
        if (!frame_singular_) {
            try {
                KappaBundle kb = kappa_bundle(st.u10_hat);
                e7_dxx_u2_.add_sample(t, dxx(u2n, clk), clk);
                e7_dxx_u3_.add_sample(t, dxx(u3n, clk), clk);
                e7_good_u2_.add_sample(
                    t, derivative(good_derivative(u2n, kb, clk), Axis::x, clk), clk);
                e7_good_u3_.add_sample(
                    t, derivative(good_derivative(u3n, kb, clk), Axis::x, clk), clk);
                SpectralField q = q_field(st, kb);
                add_grad_xa_sample(e7_grad_q_, t, derivative(q, Axis::x, clk), clk);
            } catch (const singular_frame_error&) {
                frame_singular_ = true;
            }
        }
        last_t_ = t;
    }

    EnergyReport report() const {
        EnergyReport r;
        double nu13 = std::cbrt(nu_);
        r.e11 = e11_sup_.sup + std::sqrt(nu_ * e11_grad_.integral2) +
                e11_dt_.sup / nu_;
        r.e12 = e12_sup_.sup + std::sqrt(nu_ * e12_grad_.integral2);
        r.e1 = r.e11 + std::pow(nu_, -2.0 / 3.0) * r.e12;
        r.e2 = e2_lap_u20_.value() + e2_u30_.value() + e2_grad_u30_.value() +
               e2_weighted_lap_u30_.value();
        r.e3 = e3_theta0_.value() + e3_grad_theta0_.value() + e3_dz_grad_theta0_.value();
        r.e41 = e41_lap_u2_.value() + e41_dxz_u3_.value();
        r.e42 = nu13 * (e42_grad_.sup + std::sqrt(nu_ * e42_lap_.integral2));
        r.e4 = r.e41 + r.e42;
        r.e5 = e5_dxx_theta_.value() + e5_dzz_theta_.value();
        r.e6 = e6_dxx_u2_.value() + e6_dxx_u3_.value();
        r.e7 = e7_dxx_u2_.value2() + e7_dxx_u3_.value2() + e7_good_u2_.value2() +
               e7_good_u3_.value2() + e7_grad_q_.value2();
        r.frame_singular = frame_singular_;

        auto cond = [&](const std::string& name, double value, double threshold) {
            EnergyReport::Condition c;
            c.name = name;
            c.value = value;
            c.threshold = threshold;
            c.margin = threshold > 0.0 ? value / threshold : 0.0;
            c.ok = value <= threshold;
            r.bootstrap_ok = r.bootstrap_ok && c.ok;
            r.bootstrap.push_back(c);
        };
        cond("E1", r.e1, eps0_);
        cond("E2", r.e2, eps0_ * nu_);
        cond("E3", r.e3, eps0_ * nu_ * nu_);
        cond("E4", r.e4, eps0_ * nu_);
        cond("E5", r.e5, eps0_ * nu_ * nu_);
        cond("E6", r.e6, eps0_ * nu_);
        return r;
    }

  private:
    static SpectralField dxx(const SpectralField& f, const ShearClock& clk) {
        return derivative(derivative(f, Axis::x, clk), Axis::x, clk);
    }
    /// H^k norm of the full gradient (all three components).
    static double grad_sobolev(const SpectralField& f, int order, const ShearClock& clk) {
        double s = 0.0;
        for (Axis ax : {Axis::x, Axis::y, Axis::z}) {
            double n = sobolev_norm(derivative(f, ax, clk), order, clk);
            s += n * n;
        }
        return std::sqrt(s);
    }
    /// Feed the Y0 accumulator with the (vector) gradient of f.
    static void add_grad_sample(NormAccumulator& acc, double t, const SpectralField& f,
                                const ShearClock& clk) {
        double g = grad_l2_norm(f, clk);
        double gg = 0.0;
        for (Axis ax : {Axis::x, Axis::y, Axis::z}) {
            double n = grad_l2_norm(derivative(f, ax, clk), clk);
            gg += n * n;
        }
        acc.add_raw(t, g, std::sqrt(gg));
    }
    /// Feed the Xa accumulator with the (vector) gradient of f.
    static void add_grad_xa_sample(NormAccumulator& acc, double t, const SpectralField& f,
                                   const ShearClock& clk) {
        double g = grad_l2_norm(f, clk);
        double gg = 0.0, cc = 0.0;
        for (Axis ax : {Axis::x, Axis::y, Axis::z}) {
            SpectralField d = derivative(f, ax, clk);
            double n = grad_l2_norm(d, clk);
            gg += n * n;
            double c = grad_l2_norm(
                inverse_laplacian(derivative(d, Axis::x, clk), clk), clk);
            cc += c * c;
        }
        acc.add_raw(t, g, std::sqrt(gg), std::sqrt(cc));
    }

    double nu_ = 1.0, a_ = 0.0, b_ = 0.0, eps0_ = 0.0;
    bool frame_singular_ = false;
    double last_t_ = 0.0;

    detail::RunningNorm e11_sup_, e11_grad_, e11_dt_;
    detail::RunningNorm e12_sup_, e12_grad_;
    NormAccumulator e2_lap_u20_, e2_u30_, e2_grad_u30_, e2_weighted_lap_u30_;
    NormAccumulator e3_theta0_, e3_grad_theta0_, e3_dz_grad_theta0_;
    NormAccumulator e41_lap_u2_, e41_dxz_u3_;
    detail::RunningNorm e42_grad_, e42_lap_;
    NormAccumulator e5_dxx_theta_, e5_dzz_theta_;
    NormAccumulator e6_dxx_u2_, e6_dxx_u3_;
    NormAccumulator e7_dxx_u2_, e7_dxx_u3_, e7_good_u2_, e7_good_u3_, e7_grad_q_;
};

inline void update_accumulators(const State& st, EnergyTracker& tracker,
                                const Params& params) {
    tracker.add_sample(st, params);
}

inline EnergyReport energy_report(const EnergyTracker& tracker) {
    return tracker.report();
}

// ---------------------------------------------------------------------------
// Decay-rate fitting for enhanced-dissipation measurements.
// ---------------------------------------------------------------------------

struct TimeSample {
    double t = 0, value = 0;
};

/// Least-squares slope of log(value) against t over [t0, t1]; returns lambda
/// with value ~ exp(-lambda t).
inline double fit_decay_rate(const std::vector<TimeSample>& series, double t0,
                             double t1) {
    std::vector<double> ts, ys;
    for (const auto& s : series) {
        if (s.t < t0 || s.t > t1) continue;
        if (!(s.value > 0.0))
            throw domain_error("fit_decay_rate: nonpositive value at t = " +
                               std::to_string(s.t));
        ts.push_back(s.t);
        ys.push_back(std::log(s.value));
    }
    if (ts.size() < 10)
        throw domain_error("fit_decay_rate: need at least 10 samples in the window, got " +
                           std::to_string(ts.size()));
    double n = double(ts.size());
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        st += ts[i];
        sy += ys[i];
        stt += ts[i] * ts[i];
        sty += ts[i] * ys[i];
    }
    double slope = (n * sty - st * sy) / (n * stt - st * st);
    return -slope;
}

}  // namespace cblb

#endif
