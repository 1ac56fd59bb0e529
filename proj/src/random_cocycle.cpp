#include "angval/random_cocycle.hpp"

#include <cmath>

#include "angval/errors.hpp"
#include "angval/rng.hpp"

namespace angval {

namespace {

Eigen::Matrix2d rotation_matrix(double phi) {
    Eigen::Matrix2d t;
    t << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
    return t;
}

constexpr std::uint64_t kPathPurpose = 0x9a7091;

}  // namespace

CocycleDriver CocycleDriver::iid_angles(double lo, double hi, std::uint64_t seed) {
    if (!(0.0 <= lo && lo <= hi && hi <= kPi / 2.0)) {
        throw ParamRange("iid_angles requires 0 <= lo <= hi <= pi/2");
    }
    CocycleDriver d;
    d.kind_ = "iid_angles";
    d.dim_ = 2;
    d.seed_ = seed;
    d.lo_ = lo;
    d.hi_ = hi;
    return d;
}

CocycleDriver CocycleDriver::iid_finite_set(std::vector<Eigen::MatrixXd> matrices,
                                            std::vector<double> probabilities,
                                            std::uint64_t seed) {
    if (matrices.empty() || matrices.size() != probabilities.size()) {
        throw ParamRange("finite set driver needs matching matrices/probabilities");
    }
    double total = 0.0;
    for (double p : probabilities) {
        if (p < 0.0) throw ParamRange("negative probability");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw ParamRange("probabilities must sum to 1 within 1e-12");
    }
    Eigen::Index dim = matrices[0].rows();
    for (const auto& m : matrices) {
        if (m.rows() != dim || m.cols() != dim) {
            throw DimensionMismatch("finite set matrices must share one square shape");
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
        const auto& sv = svd.singularValues();
        if (sv(sv.size() - 1) <= 1e-12 * sv(0)) {
            throw SingularMatrix("finite set contains a singular matrix");
        }
    }
    CocycleDriver d;
    d.kind_ = "iid_finite_set";
    d.dim_ = dim;
    d.seed_ = seed;
    d.mats_ = std::move(matrices);
    d.cum_.resize(probabilities.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        acc += probabilities[i];
        d.cum_[i] = acc;
    }
    d.cum_.back() = 1.0;
    return d;
}

CocycleDriver CocycleDriver::torus_rotation(double alpha,
                                            std::function<Eigen::MatrixXd(double)> family,
                                            Eigen::Index dim, std::uint64_t seed,
                                            double omega0) {
    if (!family) throw ParamRange("torus rotation needs a matrix family");
    CocycleDriver d;
    d.kind_ = "torus_rotation";
    d.dim_ = dim;
    d.seed_ = seed;
    d.alpha_ = alpha;
    d.omega0_ = omega0;
    d.family_ = std::move(family);
    // spot-check invertibility over the circle
    for (int i = 0; i < 16; ++i) {
        double w = i / 16.0;
        Eigen::MatrixXd m = d.family_(w);
        if (m.rows() != dim || m.cols() != dim) {
            throw DimensionMismatch("torus family produced wrong shape");
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
        const auto& sv = svd.singularValues();
        if (sv(sv.size() - 1) <= 1e-12 * sv(0)) {
            throw SingularMatrix("torus family is singular at omega = " + std::to_string(w));
        }
    }
    return d;
}

MatrixSequence CocycleDriver::sample_path(std::uint64_t rep) const {
    const std::uint64_t key = rng::derive(seed_, kPathPurpose, rep);
    if (kind_ == "iid_angles") {
        double lo = lo_, hi = hi_;
        auto produce = [key, lo, hi](long n) -> Eigen::MatrixXd {
            double u = static_cast<double>(
                           rng::mix(key + 0x9e3779b97f4a7c15ULL *
                                              static_cast<std::uint64_t>(n + 1)) >> 11) *
                       0x1.0p-53;
            return rotation_matrix(lo + (hi - lo) * u);
        };
        return MatrixSequence(2, produce, "iid_angles");
    }
    if (kind_ == "iid_finite_set") {
        auto mats = mats_;
        auto cum = cum_;
        auto produce = [key, mats, cum](long n) -> Eigen::MatrixXd {
            double u = static_cast<double>(
                           rng::mix(key + 0x9e3779b97f4a7c15ULL *
                                              static_cast<std::uint64_t>(n + 1)) >> 11) *
                       0x1.0p-53;
            std::size_t i = 0;
            while (i + 1 < cum.size() && u >= cum[i]) ++i;
            return mats[i];
        };
        return MatrixSequence(dim_, produce, "iid_finite_set");
    }
    // torus rotation: omega advances deterministically; rep shifts the start
    double alpha = alpha_;
    double w0 = omega0_;
    if (rep != 0) {
        w0 = std::fmod(w0 + static_cast<double>(rng::mix(key) >> 11) * 0x1.0p-53, 1.0);
    }
    auto family = family_;
    auto produce = [family, alpha, w0](long n) -> Eigen::MatrixXd {
        double w = std::fmod(w0 + static_cast<double>(n) * alpha, 1.0);
        if (w < 0.0) w += 1.0;
        return family(w);
    };
    return MatrixSequence(dim_, produce, "torus_rotation");
}

RandomEstimate birkhoff_outer(const CocycleDriver& driver, const Frame& v0, long n,
                              int reps) {
    if (n < 1 || reps < 1) throw ParamRange("birkhoff_outer: n >= 1 and reps >= 1");
    if (v0.dim() != driver.dim()) throw DimensionMismatch("initial frame has wrong dimension");
    std::vector<double> means(reps);
    for (int r = 0; r < reps; ++r) {
        MatrixSequence path = driver.sample_path(static_cast<std::uint64_t>(r));
        std::vector<double> b = orbit_angles(path, v0, n);
        double s = 0.0;
        for (double x : b) s += x;
        means[r] = s / static_cast<double>(n);
    }
    RandomEstimate est;
    est.n = n;
    est.reps = reps;
    double mean = 0.0;
    for (double m : means) mean += m;
    mean /= reps;
    est.value = mean;
    if (reps > 1) {
        double var = 0.0;
        for (double m : means) var += (m - mean) * (m - mean);
        var /= (reps - 1);
        est.stderr_ = std::sqrt(var / reps);
    }
    return est;
}

RandomEstimate inner_estimate(const CocycleDriver& driver, const EstimatorConfig& cfg,
                              int reps) {
    if (reps < 1) throw ParamRange("inner_estimate: reps >= 1");
    const std::size_t L = cfg.n_ladder.size();
    std::vector<std::vector<double>> per_rep(reps);

    for (int r = 0; r < reps; ++r) {
        MatrixSequence path = driver.sample_path(static_cast<std::uint64_t>(r));
        EstimatorConfig local = cfg;
        local.k_window = 0;  // inner estimate needs only a_{1,n}
        local.seed = rng::derive(cfg.seed, 0x1aaec5, r);
        AngularEstimates est = estimate_angular_values(path, local);
        per_rep[r] = est.inner_trace;
    }

    RandomEstimate est;
    est.reps = reps;
    est.ladder = cfg.n_ladder;
    est.trace.resize(L);
    est.trace_stderr.resize(L);
    for (std::size_t j = 0; j < L; ++j) {
        double mean = 0.0;
        for (int r = 0; r < reps; ++r) mean += per_rep[r][j];
        mean /= reps;
        est.trace[j] = mean;
        double var = 0.0;
        for (int r = 0; r < reps; ++r) {
            var += (per_rep[r][j] - mean) * (per_rep[r][j] - mean);
        }
        est.trace_stderr[j] = reps > 1 ? std::sqrt(var / (reps - 1) / reps) : 0.0;
    }
    est.n = cfg.n_ladder.back();
    est.value = est.trace.back();
    est.stderr_ = est.trace_stderr.back();
    for (std::size_t j = 1; j < L; ++j) {
        double slack = 3.0 * (est.trace_stderr[j] + est.trace_stderr[j - 1]) + 1e-12;
        if (est.trace[j] > est.trace[j - 1] + slack) est.monotone_trend = false;
    }
    return est;
}

Eigen::MatrixXd random_uniform_matrix(Eigen::Index d, std::uint64_t seed) {
    rng::Stream st(rng::derive(seed, 0x3a7));
    Eigen::MatrixXd m(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = st.next_u01();
    return m;
}

}  // namespace angval
