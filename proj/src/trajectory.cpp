#include "angval/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <thread>

#include "angval/errors.hpp"
#include "angval/matrix_io.hpp"
#include "angval/optimize.hpp"
#include "angval/rng.hpp"

namespace angval {

MatrixSequence::MatrixSequence(Eigen::Index dim,
                               std::function<Eigen::MatrixXd(long)> producer,
                               std::string label)
    : dim_(dim), producer_(std::move(producer)), label_(std::move(label)) {
    if (dim_ < 1) throw ParamRange("sequence dimension must be >= 1");
}

Eigen::MatrixXd MatrixSequence::at(long n) const {
    if (!producer_) throw ParamRange("empty sequence");
    Eigen::MatrixXd m = producer_(n);
    if (m.rows() != dim_ || m.cols() != dim_) {
        throw DimensionMismatch("sequence produced a matrix of wrong shape at index " +
                                std::to_string(n));
    }
    return m;
}

namespace {

Eigen::Matrix2d rotation_matrix(double phi) {
    Eigen::Matrix2d t;
    t << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
    return t;
}

void check_invertible(const Eigen::MatrixXd& m, const std::string& what) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= 1e-12 * sv(0)) {
        throw SingularMatrix(what + ": matrix fails the invertibility guard");
    }
}

}  // namespace

MatrixSequence constant_sequence(const Eigen::MatrixXd& a, std::string label) {
    if (a.rows() != a.cols()) throw DimensionMismatch("constant sequence needs a square matrix");
    check_invertible(a, label);
    Eigen::MatrixXd copy = a;
    return MatrixSequence(a.rows(), [copy](long) { return copy; }, std::move(label));
}

MatrixSequence rotation_sequence(double phi) {
    return constant_sequence(rotation_matrix(phi), "rotation");
}

MatrixSequence example1_sequence(double phi0, double phi1) {
    if (!(phi0 >= 0.0 && phi0 < phi1 && phi1 <= kPi / 2.0)) {
        throw ParamRange("example1 requires 0 <= phi0 < phi1 <= pi/2");
    }
    Eigen::Matrix2d t0 = rotation_matrix(phi0);
    Eigen::Matrix2d t1 = rotation_matrix(phi1);
    auto produce = [t0, t1](long n) -> Eigen::MatrixXd {
        if (n == 0) return t0;
        long m = 0;
        for (long v = n; v > 1; v >>= 1) ++m;  // floor(log2 n)
        return (m % 2 == 1) ? t0 : t1;         // [2^(2l-1), 2^(2l)-1] blocks use phi0
    };
    return MatrixSequence(2, produce, "example1");
}

MatrixSequence example2_sequence() {
    Eigen::Matrix2d c, r;
    c << 1.0, 0.0, 0.0, 0.5;
    r << -1.0, 0.0, 0.0, 1.0;
    auto produce = [c, r](long n) -> Eigen::MatrixXd {
        for (long l = 1;; ++l) {
            long lo = 4 * (1L << (l - 1)) - 4;  // 2*2^l - 4
            long hi = 3 * (1L << l) - 5;
            if (n < lo) break;
            if (n <= hi) return r;
        }
        return c;
    };
    return MatrixSequence(2, produce, "example2");
}

Frame example2_witness(int ell) {
    if (ell < 1 || ell > 10) {
        throw ParamRange("example2 witness representable for 1 <= ell <= 10");
    }
    long k = (1L << ell) - 2;  // C count before the ell-th reflection run
    // the tiny component must survive; plain QR would flush it, the direct
    // Frame constructor keeps it (the norm is 1 in double anyway)
    Eigen::Vector2d v(std::ldexp(1.0, -static_cast<int>(k)), 1.0);
    v /= v.norm();
    return Frame(v);
}

MatrixSequence henon_sequence(double a, double b, long transient) {
    if (b == 0.0) throw ParamRange("henon requires b != 0 for invertibility");
    struct Cache {
        std::mutex mu;
        std::vector<double> xs;  // x-coordinates of the orbit after transient
        double a, b;
        double x, y;  // current state at index xs.size()
    };
    auto cache = std::make_shared<Cache>();
    cache->a = a;
    cache->b = b;
    double x = 0.0, y = 0.0;
    for (long i = 0; i < transient; ++i) {
        double xn = 1.0 + y - a * x * x;
        y = b * x;
        x = xn;
        if (!std::isfinite(x) || std::abs(x) > 1e8) {
            throw ParamRange("henon orbit escaped during transient; adjust (a,b)");
        }
    }
    cache->x = x;
    cache->y = y;
    auto produce = [cache](long n) -> Eigen::MatrixXd {
        std::lock_guard<std::mutex> lock(cache->mu);
        while (static_cast<long>(cache->xs.size()) <= n) {
            cache->xs.push_back(cache->x);
            double xn = 1.0 + cache->y - cache->a * cache->x * cache->x;
            cache->y = cache->b * cache->x;
            cache->x = xn;
            if (!std::isfinite(cache->x) || std::abs(cache->x) > 1e8) {
                throw SequenceSingular(static_cast<std::size_t>(n),
                                       "henon orbit escaped at index " + std::to_string(n));
            }
        }
        Eigen::Matrix2d df;
        df << -2.0 * cache->a * cache->xs[n], 1.0, cache->b, 0.0;
        return df;
    };
    return MatrixSequence(2, produce, "henon");
}

MatrixSequence from_file_sequence(const std::string& path, bool periodic) {
    auto mats = std::make_shared<std::vector<Eigen::MatrixXd>>(read_matrix_list_file(path));
    if (mats->empty()) throw ParseError(path + ": no matrices found");
    Eigen::Index d = (*mats)[0].rows();
    for (std::size_t i = 0; i < mats->size(); ++i) {
        const auto& m = (*mats)[i];
        if (m.rows() != d || m.cols() != d) {
            throw DimensionMismatch(path + ": matrix " + std::to_string(i) +
                                    " has inconsistent shape");
        }
        check_invertible(m, path + ": matrix " + std::to_string(i));
    }
    std::size_t count = mats->size();
    auto produce = [mats, count, periodic, path](long n) -> Eigen::MatrixXd {
        std::size_t idx = static_cast<std::size_t>(n);
        if (idx >= count) {
            if (!periodic) {
                throw SequenceExhausted(path + ": index " + std::to_string(n) +
                                        " beyond the " + std::to_string(count) +
                                        " stored matrices (use periodic extension)");
            }
            idx %= count;
        }
        return (*mats)[idx];
    };
    return MatrixSequence(d, produce, "file:" + path);
}

namespace {

double line_angle(const Eigen::VectorXd& v, const Eigen::VectorXd& w) {
    double c = v.dot(w);
    double sgn = c < 0 ? -1.0 : 1.0;
    double s = (v - sgn * w).norm() * (v + sgn * w).norm() / 2.0;
    return std::atan2(s, std::abs(c));
}

// One propagation step: frame <- orthonormal basis of A * frame; returns the
// max principal angle between the old and new subspaces.
double step_frame(const MatrixSequence& seq, long index, Eigen::MatrixXd& frame) {
    Eigen::MatrixXd mat = seq.at(index);
    Eigen::MatrixXd img = mat * frame;
    const double scale = mat.cwiseAbs().maxCoeff();
    if (frame.cols() == 1) {
        double nrm = img.norm();
        if (!(nrm > 1e-12 * scale)) {
            throw SequenceSingular(static_cast<std::size_t>(index),
                                   "sequence matrix annihilates the subspace at index " +
                                       std::to_string(index));
        }
        img /= nrm;
        double ang = line_angle(frame.col(0), img.col(0));
        frame.swap(img);
        return ang;
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(img);
    Eigen::MatrixXd r = qr.matrixQR().topRows(img.cols()).triangularView<Eigen::Upper>();
    if (r.diagonal().cwiseAbs().minCoeff() <= 1e-12 * scale) {
        throw SequenceSingular(static_cast<std::size_t>(index),
                               "sequence matrix collapses the subspace at index " +
                                   std::to_string(index));
    }
    Eigen::MatrixXd q =
        qr.householderQ() * Eigen::MatrixXd::Identity(img.rows(), img.cols());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(frame.transpose() * q);
    double cmin = svd.singularValues()(img.cols() - 1);
    double ang;
    if (cmin < 0.5) {
        ang = std::acos(std::min(1.0, std::max(0.0, cmin)));
    } else {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd2(frame.transpose() * q, Eigen::ComputeFullV);
        Eigen::VectorXd y = svd2.matrixV().col(img.cols() - 1);
        Eigen::VectorXd qy = q * y;
        Eigen::VectorXd resid = qy - frame * (frame.transpose() * qy);
        ang = std::atan2(resid.norm(), std::min(1.0, cmin));
    }
    frame.swap(q);
    return ang;
}

}  // namespace

std::vector<double> orbit_angles(const MatrixSequence& seq, const Frame& v0, long n) {
    if (v0.dim() != seq.dim()) {
        throw DimensionMismatch("initial frame dimension does not match the sequence");
    }
    std::vector<double> out;
    out.reserve(n);
    Eigen::MatrixXd frame = v0.columns();
    for (long j = 0; j < n; ++j) out.push_back(step_frame(seq, j, frame));
    return out;
}

namespace {

struct CandidateStats {
    std::vector<double> f;     // (1/n) a_{1,n}
    std::vector<double> gsup;  // (1/n) sup_k a_{k+1,k+n}
    std::vector<double> ginf;  // (1/n) inf_k a_{k+1,k+n}
};

CandidateStats evaluate_candidate(const MatrixSequence& seq, const Eigen::MatrixXd& frame0,
                                  const std::vector<long>& ladder, long k_window) {
    const long n_max = ladder.back();
    const long total = n_max + k_window;
    std::vector<double> prefix(total + 1, 0.0);
    Eigen::MatrixXd frame = frame0;
    for (long j = 0; j < total; ++j) prefix[j + 1] = prefix[j] + step_frame(seq, j, frame);

    CandidateStats st;
    st.f.reserve(ladder.size());
    st.gsup.reserve(ladder.size());
    st.ginf.reserve(ladder.size());
    for (long n : ladder) {
        st.f.push_back(prefix[n] / static_cast<double>(n));
        double hi = -1.0, lo = 1e300;
        for (long k = 0; k <= k_window; ++k) {
            double a = prefix[k + n] - prefix[k];
            hi = std::max(hi, a);
            lo = std::min(lo, a);
        }
        st.gsup.push_back(hi / static_cast<double>(n));
        st.ginf.push_back(lo / static_cast<double>(n));
    }
    return st;
}

std::vector<Eigen::MatrixXd> build_candidates(const MatrixSequence& seq,
                                              const EstimatorConfig& cfg) {
    const Eigen::Index d = seq.dim();
    const Eigen::Index s = cfg.s;
    std::vector<Eigen::MatrixXd> cands;
    if (s == 1 && d == 2) {
        int g = std::max(2, cfg.search.angle_grid);
        for (int i = 0; i < g; ++i) {
            double t = kPi * i / g;
            Eigen::MatrixXd v(2, 1);
            v << std::cos(t), std::sin(t);
            cands.push_back(v);
        }
    } else {
        if (cfg.search.coordinate_seeds) {
            std::vector<int> pick(s);
            for (Eigen::Index i = 0; i < s; ++i) pick[i] = static_cast<int>(i);
            int emitted = 0;
            for (;;) {
                Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, s);
                for (Eigen::Index j = 0; j < s; ++j) m(pick[j], j) = 1.0;
                cands.push_back(m);
                if (++emitted >= 64) break;
                // next combination
                Eigen::Index i = s;
                while (i > 0 && pick[i - 1] == static_cast<int>(d - s + i - 1)) --i;
                if (i == 0) break;
                ++pick[i - 1];
                for (Eigen::Index j = i; j < s; ++j) pick[j] = pick[j - 1] + 1;
            }
        }
        for (int i = 0; i < cfg.search.random_frames; ++i) {
            cands.push_back(
                random_frame(d, s, rng::derive(cfg.seed, 0xf7a3e5ull, i)).columns());
        }
    }
    for (const auto& m : cfg.search.extra_frames) {
        Eigen::MatrixXd g = m.transpose() * m;
        g.diagonal().array() -= 1.0;
        // keep already-orthonormal frames untouched: QR would flush
        // deliberately tiny components (e.g. the example2 witnesses)
        if (g.cwiseAbs().maxCoeff() <= 1e-12) {
            cands.push_back(m);
        } else {
            cands.push_back(orthonormalize(m).columns());
        }
    }
    return cands;
}

}  // namespace

AngularEstimates estimate_angular_values(const MatrixSequence& seq,
                                         const EstimatorConfig& cfg) {
    if (cfg.s < 1 || cfg.s > seq.dim()) throw ParamRange("estimator: 1 <= s <= d required");
    if (cfg.n_ladder.empty()) throw ParamRange("estimator: empty horizon ladder");
    for (std::size_t i = 1; i < cfg.n_ladder.size(); ++i) {
        if (cfg.n_ladder[i] <= cfg.n_ladder[i - 1]) {
            throw ParamRange("estimator: horizon ladder must increase");
        }
    }
    if (cfg.n_ladder.front() < 1 || cfg.k_window < 0) {
        throw ParamRange("estimator: horizons must be >= 1 and k_window >= 0");
    }

    std::vector<Eigen::MatrixXd> cands = build_candidates(seq, cfg);
    std::vector<CandidateStats> stats(cands.size());

    auto run_range = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            stats[i] = evaluate_candidate(seq, cands[i], cfg.n_ladder, cfg.k_window);
        }
    };
    int jobs = std::max(1, cfg.jobs);
    if (jobs == 1 || cands.size() < 2) {
        run_range(0, cands.size());
    } else {
        std::vector<std::thread> pool;
        std::size_t chunk = (cands.size() + jobs - 1) / jobs;
        for (int t = 0; t < jobs; ++t) {
            std::size_t lo = t * chunk, hi = std::min(cands.size(), lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(run_range, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    const std::size_t L = cfg.n_ladder.size();
    const std::size_t n_last = cands.empty() ? 0 : L - 1;

    // local refinement of the best end-horizon candidate
    if (cfg.search.refine && !cands.empty()) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < cands.size(); ++i) {
            if (stats[i].f[n_last] > stats[best].f[n_last]) best = i;
        }
        Eigen::MatrixXd cur = cands[best];
        double curval = stats[best].f[n_last];
        double step = (cfg.s == 1 && seq.dim() == 2)
                          ? kPi / std::max(2, cfg.search.angle_grid)
                          : 0.25;
        rng::Stream st(rng::derive(cfg.seed, 0x5ef1feull));
        int stale = 0;
        while (step > 1e-9 && stale < 200) {
            // single-plane rotation with shrinking step
            Eigen::Index p = static_cast<Eigen::Index>(st.next_u64() % seq.dim());
            Eigen::Index q = static_cast<Eigen::Index>(st.next_u64() % seq.dim());
            if (p == q) {
                step *= 0.97;
                continue;
            }
            double sgn = st.next_u01() < 0.5 ? 1.0 : -1.0;
            Eigen::MatrixXd rot = Eigen::MatrixXd::Identity(seq.dim(), seq.dim());
            rot(p, p) = rot(q, q) = std::cos(sgn * step);
            rot(p, q) = -std::sin(sgn * step);
            rot(q, p) = std::sin(sgn * step);
            Eigen::MatrixXd cand = rot * cur;
            CandidateStats cs = evaluate_candidate(seq, cand, cfg.n_ladder, cfg.k_window);
            if (cs.f[n_last] > curval) {
                cur = cand;
                curval = cs.f[n_last];
                cands.push_back(cand);
                stats.push_back(std::move(cs));
                stale = 0;
            } else {
                step *= 0.9;
                ++stale;
            }
        }
    }

    AngularEstimates est;
    est.ladder = cfg.n_ladder;
    est.inner_trace.assign(L, -1.0);
    est.uniform_sup_trace.assign(L, -1.0);
    est.uniform_inf_trace.assign(L, -1.0);
    for (std::size_t j = 0; j < L; ++j) {
        for (const auto& stc : stats) {
            est.inner_trace[j] = std::max(est.inner_trace[j], stc.f[j]);
            est.uniform_sup_trace[j] = std::max(est.uniform_sup_trace[j], stc.gsup[j]);
            est.uniform_inf_trace[j] = std::max(est.uniform_inf_trace[j], stc.ginf[j]);
        }
    }

    const std::size_t tail = std::max<std::size_t>(1, (L + 2) / 3);
    const std::size_t t0 = L - tail;
    auto tail_max = [&](const std::vector<double>& v) {
        double m = -1e300;
        for (std::size_t j = t0; j < L; ++j) m = std::max(m, v[j]);
        return m;
    };
    auto tail_min = [&](const std::vector<double>& v) {
        double m = 1e300;
        for (std::size_t j = t0; j < L; ++j) m = std::min(m, v[j]);
        return m;
    };

    est.inner_upper = tail_max(est.inner_trace);
    est.inner_lower = tail_min(est.inner_trace);
    est.uniform_inner_upper = tail_max(est.uniform_sup_trace);
    est.uniform_inner_lower = tail_min(est.uniform_inf_trace);

    est.outer_upper = est.outer_lower = -1e300;
    est.uniform_outer_upper = est.uniform_outer_lower = -1e300;
    std::size_t best_outer = 0;
    for (std::size_t i = 0; i < stats.size(); ++i) {
        double ls = tail_max(stats[i].f);
        double li = tail_min(stats[i].f);
        if (ls > est.outer_upper) {
            est.outer_upper = ls;
            best_outer = i;
        }
        est.outer_lower = std::max(est.outer_lower, li);
        est.uniform_outer_upper = std::max(est.uniform_outer_upper, tail_max(stats[i].gsup));
        est.uniform_outer_lower = std::max(est.uniform_outer_lower, tail_min(stats[i].ginf));
    }
    if (!cands.empty()) {
        est.argmax_outer = cands[best_outer];
        est.argmax_outer_trace = stats[best_outer].f;
    }
    return est;
}

ShiftCheckReport shift_maximizer_check(const MatrixSequence& seq, int s, int eta_max,
                                       const EstimatorConfig& cfg_in) {
    EstimatorConfig cfg = cfg_in;
    cfg.s = s;

    auto argmax_for_shift = [&](long eta, const Eigen::MatrixXd* warm,
                                double* value) -> Eigen::MatrixXd {
        MatrixSequence shifted(seq.dim(), [&seq, eta](long n) { return seq.at(n + eta); },
                               seq.label() + "+" + std::to_string(eta));
        EstimatorConfig local = cfg;
        if (warm != nullptr) local.search.extra_frames.push_back(*warm);
        AngularEstimates est = estimate_angular_values(shifted, local);
        // Tie preference: keep the propagated frame when it maximizes up to
        // the one-step window effect (shifting the horizon by one changes
        // the average by at most pi/n).
        if (warm != nullptr) {
            CandidateStats ws =
                evaluate_candidate(shifted, *warm, cfg.n_ladder, cfg.k_window);
            double warm_ls = ws.f.back();
            std::size_t L = cfg.n_ladder.size();
            std::size_t tail = std::max<std::size_t>(1, (L + 2) / 3);
            for (std::size_t j = L - tail; j < L; ++j) warm_ls = std::max(warm_ls, ws.f[j]);
            double tie_tol = 2.0 * kPi / static_cast<double>(cfg.n_ladder.back());
            *value = std::max(0.0, est.outer_upper - warm_ls);
            if (warm_ls >= est.outer_upper - tie_tol) {
                return *warm;
            }
            return est.argmax_outer;
        }
        *value = 0.0;
        return est.argmax_outer;
    };

    ShiftCheckReport rep;
    double dummy;
    Eigen::MatrixXd prev = argmax_for_shift(0, nullptr, &dummy);
    for (int eta = 0; eta < eta_max; ++eta) {
        Eigen::MatrixXd pushed = seq.at(eta) * prev;
        Eigen::MatrixXd warm;
        if (pushed.cols() == 1) {
            warm = pushed / pushed.norm();  // keeps tiny components intact
        } else {
            warm = orthonormalize(pushed).columns();
        }
        double value_gap = 0.0;
        Eigen::MatrixXd next = argmax_for_shift(eta + 1, &warm, &value_gap);
        double ang = max_angle(Frame(warm), Frame(next));
        rep.angle_discrepancy.push_back(ang);
        rep.value_discrepancy.push_back(value_gap);
        rep.max_angle_discrepancy = std::max(rep.max_angle_discrepancy, ang);
        rep.max_value_discrepancy = std::max(rep.max_value_discrepancy, value_gap);
        prev = next;
    }
    return rep;
}

}  // namespace angval
