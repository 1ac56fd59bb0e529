#include "angval/theta2d.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "angval/errors.hpp"
#include "angval/geometry.hpp"
#include "angval/optimize.hpp"

namespace angval {

double psi(double rho, double x) {
    if (!(rho > 0.0)) throw ParamRange("psi: rho must be positive");
    double n = std::round(x / kPi);
    double y = x - n * kPi;  // in [-pi/2, pi/2]
    if (std::abs(y) == kPi / 2.0) return y + n * kPi;  // fixed point of every psi
    // atan2 form of arctan(rho tan y): accurate up to the poles
    double v = std::atan2(rho * std::sin(y), std::cos(y));
    return v + n * kPi;
}

double iterate_map(double rho, double phi, double theta) {
    // reduce first so large lifts do not eat the low bits of phi
    double m = std::round(theta / kPi);
    double y = theta - m * kPi;
    return psi(rho, phi + psi(1.0 / rho, y)) + m * kPi;
}

double orbit_angle(double rho, double phi, double theta0, long j) {
    return psi(rho, static_cast<double>(j) * phi + psi(1.0 / rho, theta0));
}

double delta(double rho, double phi, double theta) {
    return 2.0 * psi(rho, theta) - 2.0 * psi(rho, theta + phi) + kPi;
}

double skew_normal(double rho, double phi) {
    return 0.5 * (rho + 1.0 / rho) * std::abs(std::sin(phi));
}

double beta(double rho, double phi) {
    double gap = 1.0 / rho - rho;
    if (gap == 0.0) return std::numeric_limits<double>::infinity();
    // 2 cos/sin instead of tan: no blowup at phi = pi/2
    return 2.0 * std::cos(phi) / (std::sin(phi) * gap);
}

double beta_from_skew(double rho, double phi) {
    double gap = 1.0 / rho - rho;
    if (gap == 0.0) return std::numeric_limits<double>::infinity();
    double s = skew_normal(rho, phi);
    return std::sqrt(1.0 + 4.0 * (1.0 - s * s) / (gap * gap)) / s;
}

ThetaPM theta_pm(double rho, double phi) {
    if (!(skew_normal(rho, phi) > 1.0)) {
        throw NoNegativeRegion("theta_pm requires skew > 1");
    }
    double b = beta(rho, phi);
    if (!(b < 1.0)) {
        throw NoNegativeRegion("arcsin argument >= 1; delta has no negative region");
    }
    double tpm_lo = 0.5 * std::asin(b);
    double tpm_hi = kPi / 2.0 - tpm_lo;
    ThetaPM out;
    out.lower = psi(1.0 / rho, tpm_lo);
    out.upper = psi(1.0 / rho, tpm_hi);
    return out;
}

const char* to_string(ThetaCaseTag t) {
    switch (t) {
        case ThetaCaseTag::SkewBounded: return "skew_bounded";
        case ThetaCaseTag::Irrational: return "irrational";
        case ThetaCaseTag::ResonantUnit: return "resonant_unit";
        case ThetaCaseTag::Resonant: return "resonant";
    }
    return "?";
}

PhiClass classify_phi(double phi, long q_max, double tol) {
    if (!(phi > 0.0 && phi < kPi)) throw ParamRange("classify_phi: phi must be in (0,pi)");
    if (q_max < 2) throw ParamRange("classify_phi: q_max must be >= 2");
    const double x = phi / kPi;  // in (0,1)

    PhiClass out;
    // continued-fraction convergents p_k/q_k of x
    long p_prev = 1, q_prev = 0;  // p_{-1}/q_{-1}
    long p_cur = 0, q_cur = 1;    // p_0/q_0 (a0 = 0 since x < 1)
    double frac = x;
    RationalApprox best{0, 1, x};
    for (int k = 0; k < 64; ++k) {
        if (frac <= 0.0) break;
        frac = 1.0 / frac;
        double a_f = std::floor(frac);
        if (a_f > 1e18) break;
        long a = static_cast<long>(a_f);
        frac -= a_f;
        long p_next = a * p_cur + p_prev;
        long q_next = a * q_cur + q_prev;
        if (q_next > q_max || q_next <= 0) break;
        p_prev = p_cur;
        q_prev = q_cur;
        p_cur = p_next;
        q_cur = q_next;
        double err = std::abs(x - static_cast<double>(p_cur) / static_cast<double>(q_cur));
        if (p_cur >= 1 && err < best.err) best = {p_cur, q_cur, err};
        if (p_cur >= 1 && err <= tol) {
            out.approx = best;
            out.tag = p_cur == 1 ? ThetaCaseTag::ResonantUnit : ThetaCaseTag::Resonant;
            out.nearest = best;
            return out;
        }
    }
    out.tag = ThetaCaseTag::Irrational;
    if (best.q >= 1 && best.p >= 1) out.nearest = best;
    return out;
}

namespace {

// Case (iv): average of g_j over one resonant period, as a function of theta0.
double resonant_average(double rho, double phi, long q, double theta0) {
    double prev = theta0;
    double sum = 0.0;
    for (long j = 1; j <= q; ++j) {
        double cur = orbit_angle(rho, phi, theta0, j);
        sum += std::min(cur - prev, prev + kPi - cur);
        prev = cur;
    }
    return sum / static_cast<double>(q);
}

struct IrrationalResult {
    double theta1 = 0.0;
    double quad_error = 0.0;
};

IrrationalResult irrational_value(double rho, double phi, double quad_tol) {
    ThetaPM tpm = theta_pm(rho, phi);
    auto f = [&](double t) { return delta(rho, phi, t); };
    QuadratureResult qr = adaptive_simpson(f, tpm.lower, tpm.upper, quad_tol);
    IrrationalResult out;
    out.theta1 = phi + qr.value / kPi;
    out.quad_error = qr.error_estimate;
    return out;
}

}  // namespace

Theta2DReport theta1_normal(double rho, double phi, const Theta1Options& opts) {
    if (!(rho > 0.0 && rho <= 1.0)) throw ParamRange("theta1_normal: rho must be in (0,1]");
    if (!(phi > 0.0 && phi < kPi)) throw ParamRange("theta1_normal: phi must be in (0,pi)");

    Theta2DReport rep;
    rep.rho = rho;
    rep.phi = phi;
    rep.phi_reduced = std::min(phi, kPi - phi);
    const double ph = rep.phi_reduced;
    rep.skew = skew_normal(rho, ph);

    if (rep.skew <= 1.0) {
        rep.tag = ThetaCaseTag::SkewBounded;
        rep.theta1 = ph;
        return rep;
    }

    PhiClass cls = classify_phi(ph, opts.q_max, opts.rational_tol);
    rep.tag = cls.tag;

    if (cls.tag == ThetaCaseTag::Irrational) {
        IrrationalResult ir = irrational_value(rho, ph, opts.quad_tol);
        rep.theta1 = ir.theta1;
        rep.quad_error = ir.quad_error;
        if (cls.nearest && cls.nearest->err < opts.sensitivity_band) {
            rep.sensitive = true;
            rep.p = cls.nearest->p;
            rep.q = cls.nearest->q;
            if (opts.evaluate_other_branch) {
                double alt;
                if (cls.nearest->p == 1) {
                    alt = kPi / static_cast<double>(cls.nearest->q);
                } else {
                    // informational side value; a coarser grid suffices
                    alt = grid_then_golden_max(
                              [&](double t) {
                                  return resonant_average(rho, ph, cls.nearest->q, t);
                              },
                              0.0, kPi / 2.0, static_cast<int>(6 * cls.nearest->q), 1e-8)
                              .value;
                }
                rep.other_branch = alt;
            }
            rep.note = "phi/pi within " + std::to_string(cls.nearest->err) + " of " +
                       std::to_string(cls.nearest->p) + "/" + std::to_string(cls.nearest->q) +
                       "; angular value is not lower semi-continuous there";
        }
        return rep;
    }

    rep.p = cls.approx->p;
    rep.q = cls.approx->q;
    if (cls.approx->err > 0.0 && cls.approx->err < opts.sensitivity_band) {
        rep.sensitive = true;
        rep.note = "resonant classification at distance " + std::to_string(cls.approx->err) +
                   " from " + std::to_string(rep.p) + "/" + std::to_string(rep.q);
    }

    if (cls.tag == ThetaCaseTag::ResonantUnit) {
        rep.theta1 = ph;
        if (rep.sensitive && opts.evaluate_other_branch) {
            IrrationalResult ir = irrational_value(rho, ph, opts.quad_tol);
            rep.other_branch = ir.theta1;
        }
        return rep;
    }

    // case (iv): finite maximization over theta0 in [0, pi/2]
    const long q = rep.q;
    auto avg = [&](double t) { return resonant_average(rho, ph, q, t); };
    const int grid = static_cast<int>(std::min<long>(20 * q, 100000));
    ScalarOptimum mx = grid_then_golden_max(avg, 0.0, kPi / 2.0, grid);
    ScalarOptimum mn = grid_then_golden_min(avg, 0.0, kPi / 2.0, grid);
    rep.theta1 = mx.value;
    rep.argmax_theta = mx.arg;
    rep.theta1_min = mn.value;
    if (rep.sensitive && opts.evaluate_other_branch) {
        IrrationalResult ir = irrational_value(rho, ph, opts.quad_tol);
        rep.other_branch = ir.theta1;
    }
    return rep;
}

}  // namespace angval
