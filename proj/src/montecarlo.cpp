#include "svtail/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

#include "svtail/linalg.hpp"

namespace svtail {

namespace {

constexpr double kZ95 = 1.959963984540054;

// Runs `fn` once per trial index, tallying counters across a static partition
// of the trial range. Per-trial randomness comes from (master, trial), so the
// tallies are identical for every thread count. A DegenerateSample thrown by
// `fn` discards the trial and counts it.
void run_trials(long long trials, int threads, int ncounters,
                const std::function<void(std::uint64_t, std::vector<long long>&)>& fn,
                std::vector<long long>& counters_out, long long& discards_out) {
    if (trials < 1) throw std::invalid_argument("trials must be positive");
    int nthreads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    if (nthreads < 1) nthreads = 1;
    nthreads = static_cast<int>(std::min<long long>(nthreads, trials));

    std::vector<std::vector<long long>> counters(nthreads, std::vector<long long>(ncounters, 0));
    std::vector<long long> discards(nthreads, 0);
    std::vector<std::exception_ptr> errors(nthreads);

    auto worker = [&](int w) {
        long long lo = trials * w / nthreads;
        long long hi = trials * (w + 1) / nthreads;
        try {
            for (long long t = lo; t < hi; ++t) {
                try {
                    fn(static_cast<std::uint64_t>(t), counters[w]);
                } catch (const DegenerateSample&) {
                    ++discards[w];
                }
            }
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };

    if (nthreads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (int w = 0; w < nthreads; ++w) pool.emplace_back(worker, w);
        for (auto& th : pool) th.join();
    }
    for (auto& err : errors) {
        if (err) std::rethrow_exception(err);
    }

    counters_out.assign(ncounters, 0);
    discards_out = 0;
    for (int w = 0; w < nthreads; ++w) {
        for (int c = 0; c < ncounters; ++c) counters_out[c] += counters[w][c];
        discards_out += discards[w];
    }
}

TailEstimate make_estimate(long long trials, long long successes, long long discards,
                           std::uint64_t master) {
    TailEstimate est;
    est.trials = trials;
    est.successes = successes;
    est.discarded_degenerate = discards;
    est.master_seed = master;
    return est;
}

std::vector<TailEstimate> make_estimates(long long trials, const std::vector<long long>& counters,
                                         long long discards, std::uint64_t master) {
    std::vector<TailEstimate> out;
    out.reserve(counters.size());
    for (long long c : counters) out.push_back(make_estimate(trials, c, discards, master));
    return out;
}

void require_increasing(const std::vector<double>& thresholds) {
    if (thresholds.empty()) throw std::invalid_argument("thresholds must be non-empty");
    for (std::size_t i = 1; i < thresholds.size(); ++i) {
        if (!(thresholds[i] > thresholds[i - 1])) {
            throw std::invalid_argument("thresholds must be strictly increasing");
        }
    }
}

}  // namespace

double TailEstimate::ci_low() const {
    if (trials == 0 || successes == 0) return 0.0;
    double p = p_hat();
    double z2 = kZ95 * kZ95;
    double nt = static_cast<double>(trials);
    double center = p + z2 / (2.0 * nt);
    double half = kZ95 * std::sqrt(p * (1.0 - p) / nt + z2 / (4.0 * nt * nt));
    return std::max(0.0, (center - half) / (1.0 + z2 / nt));
}

double TailEstimate::ci_high() const {
    if (trials == 0 || successes == trials) return 1.0;
    double p = p_hat();
    double z2 = kZ95 * kZ95;
    double nt = static_cast<double>(trials);
    double center = p + z2 / (2.0 * nt);
    double half = kZ95 * std::sqrt(p * (1.0 - p) / nt + z2 / (4.0 * nt * nt));
    return std::min(1.0, (center + half) / (1.0 + z2 / nt));
}

std::optional<double> TailEstimate::rule_of_three() const {
    if (trials > 0 && successes == 0) return 3.0 / static_cast<double>(trials);
    return std::nullopt;
}

TailEstimate TailEstimate::merge(const TailEstimate& a, const TailEstimate& b) {
    TailEstimate out;
    out.trials = a.trials + b.trials;
    out.successes = a.successes + b.successes;
    out.discarded_degenerate = a.discarded_degenerate + b.discarded_degenerate;
    out.master_seed = a.master_seed;
    return out;
}

const char* normalization_name(Normalization norm) {
    switch (norm) {
        case Normalization::Absolute: return "absolute";
        case Normalization::SqrtN: return "sqrt_N";
        case Normalization::InvSqrtN: return "inv_sqrt_n";
        case Normalization::Gap: return "gap";
    }
    throw std::logic_error("unreachable normalization");
}

Normalization normalization_from_name(const std::string& name) {
    if (name == "absolute") return Normalization::Absolute;
    if (name == "sqrt_N") return Normalization::SqrtN;
    if (name == "inv_sqrt_n") return Normalization::InvSqrtN;
    if (name == "gap") return Normalization::Gap;
    throw std::invalid_argument("unknown normalization: " + name);
}

double resolve_threshold(Normalization norm, double t, int big_n, int n) {
    switch (norm) {
        case Normalization::Absolute: return t;
        case Normalization::SqrtN: return t * std::sqrt(static_cast<double>(big_n));
        case Normalization::InvSqrtN: return t / std::sqrt(static_cast<double>(n));
        case Normalization::Gap:
            return t * (std::sqrt(static_cast<double>(big_n) + 1.0) - std::sqrt(static_cast<double>(n)));
    }
    throw std::logic_error("unreachable normalization");
}

std::vector<TailEstimate> estimate_sv_tail(const EnsembleSpec& spec, int big_n, int n,
                                           const std::vector<double>& thresholds, long long trials,
                                           RandomSeed seed, int threads) {
    if (big_n < n) throw std::invalid_argument("estimate_sv_tail: requires N >= n");
    require_increasing(thresholds);
    std::vector<long long> counters;
    long long discards = 0;
    run_trials(trials, threads, static_cast<int>(thresholds.size()),
               [&](std::uint64_t t, std::vector<long long>& c) {
                   RealMatrix a = sample_matrix(spec, big_n, n, RandomSeed{seed.master, seed.stream + t});
                   double sv_min = smallest_singular_value(a);
                   for (std::size_t k = 0; k < thresholds.size(); ++k) {
                       if (sv_min <= thresholds[k]) ++c[k];
                   }
               },
               counters, discards);
    return make_estimates(trials, counters, discards, seed.master);
}

TailEstimate estimate_smallball(const EnsembleSpec& spec, int n, double epsilon,
                                const RealVector& y, long long trials, RandomSeed seed,
                                int threads) {
    if (epsilon < 0.0) throw std::invalid_argument("estimate_smallball: epsilon must be >= 0");
    if (y.size() != n) throw std::invalid_argument("estimate_smallball: dimension mismatch");
    double radius = epsilon * std::sqrt(static_cast<double>(n));
    std::vector<long long> counters;
    long long discards = 0;
    run_trials(trials, threads, 1,
               [&](std::uint64_t t, std::vector<long long>& c) {
                   RealVector x = sample_vector(spec, n, RandomSeed{seed.master, seed.stream + t});
                   if (epsilon > 0.0 && (x - y).norm() <= radius) ++c[0];
               },
               counters, discards);
    return make_estimate(trials, counters[0], discards, seed.master);
}

TailEstimate estimate_paouris(const EnsembleSpec& spec, int n, double t, double paouris_c,
                              long long trials, RandomSeed seed, int threads) {
    if (t < 0.0) throw std::invalid_argument("estimate_paouris: t must be >= 0");
    double level = paouris_c * t * std::sqrt(static_cast<double>(n));
    std::vector<long long> counters;
    long long discards = 0;
    run_trials(trials, threads, 1,
               [&](std::uint64_t trial, std::vector<long long>& c) {
                   RealVector x = sample_vector(spec, n, RandomSeed{seed.master, seed.stream + trial});
                   if (x.norm() >= level) ++c[0];
               },
               counters, discards);
    return make_estimate(trials, counters[0], discards, seed.master);
}

namespace {

void enumerate_supports(int n, int k, std::vector<std::vector<int>>& out) {
    std::vector<int> cur(k);
    for (int i = 0; i < k; ++i) cur[i] = i;
    while (true) {
        out.push_back(cur);
        int i = k - 1;
        while (i >= 0 && cur[i] == n - k + i) --i;
        if (i < 0) break;
        ++cur[i];
        for (int j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
    }
}

}  // namespace

TailEstimate estimate_comp_inf_tail(const EnsembleSpec& spec, int big_n, int n, double delta,
                                    double rho, double t, long long trials, RandomSeed seed,
                                    int threads) {
    if (n > 14) throw std::invalid_argument("estimate_comp_inf_tail: n must be <= 14");
    int k = static_cast<int>(std::ceil(delta * n));
    if (k < 1 || k > n) throw std::invalid_argument("estimate_comp_inf_tail: ceil(delta n) out of range");
    std::vector<std::vector<int>> supports;
    enumerate_supports(n, k, supports);

    std::vector<long long> counters;
    long long discards = 0;
    run_trials(trials, threads, 1,
               [&](std::uint64_t trial, std::vector<long long>& c) {
                   RealMatrix a = sample_matrix(spec, big_n, n, RandomSeed{seed.master, seed.stream + trial});
                   double sv_max = singular_values(a)(0);
                   RealMatrix sub(big_n, k);
                   double min_sub = std::numeric_limits<double>::infinity();
                   for (const auto& support : supports) {
                       for (int col = 0; col < k; ++col) sub.col(col) = a.col(support[col]);
                       min_sub = std::min(min_sub, smallest_singular_value(sub));
                   }
                   if (min_sub - rho * sv_max <= t) ++c[0];
               },
               counters, discards);
    return make_estimate(trials, counters[0], discards, seed.master);
}

std::vector<TailEstimate> estimate_distance_tail(const EnsembleSpec& spec, int n,
                                                 const std::vector<double>& epsilons,
                                                 long long trials, RandomSeed seed, int threads) {
    if (n < 2) throw std::invalid_argument("estimate_distance_tail: requires n >= 2");
    require_increasing(epsilons);
    std::vector<long long> counters;
    long long discards = 0;
    run_trials(trials, threads, static_cast<int>(epsilons.size()),
               [&](std::uint64_t t, std::vector<long long>& c) {
                   RealMatrix a = sample_matrix(spec, n, n, RandomSeed{seed.master, seed.stream + t});
                   SubspaceBasis basis = orthonormal_basis(a.rightCols(n - 1));
                   if (basis.rank() != n - 1) {
                       throw DegenerateSample("distance_tail: degenerate column span");
                   }
                   RealVector residual = a.col(0);
                   for (int pass = 0; pass < 2; ++pass) {
                       residual -= basis.q * (basis.q.transpose() * residual);
                   }
                   double dist = residual.norm();
                   for (std::size_t k = 0; k < epsilons.size(); ++k) {
                       if (dist < epsilons[k]) ++c[k];
                   }
               },
               counters, discards);
    return make_estimates(trials, counters, discards, seed.master);
}

TailEstimate estimate_order_stat(const EnsembleSpec& spec, int n, double c1, double r,
                                 long long trials, RandomSeed seed, int threads) {
    if (c1 <= 0.0 || c1 >= 1.0) throw std::invalid_argument("estimate_order_stat: c1 must be in (0,1)");
    if (r < 0.0) throw std::invalid_argument("estimate_order_stat: r must be >= 0");
    int index = static_cast<int>(std::ceil(n * (1.0 - c1)));  // 1-based rank in |X*|
    index = std::clamp(index, 1, n);
    std::vector<long long> counters;
    long long discards = 0;
    run_trials(trials, threads, 1,
               [&](std::uint64_t t, std::vector<long long>& c) {
                   RealVector x = sample_vector(spec, n, RandomSeed{seed.master, seed.stream + t});
                   std::vector<double> mags(n);
                   for (int i = 0; i < n; ++i) mags[i] = std::abs(x(i));
                   std::nth_element(mags.begin(), mags.begin() + (index - 1), mags.end(),
                                    std::greater<double>());
                   if (mags[index - 1] <= r) ++c[0];
               },
               counters, discards);
    return make_estimate(trials, counters[0], discards, seed.master);
}

ProjectedTailResult estimate_projected_sv_tail(const EnsembleSpec& spec, int big_n, int n,
                                               const std::vector<int>& j,
                                               const std::vector<double>& thresholds,
                                               long long trials, RandomSeed seed, int threads,
                                               const RealVector* fixed_x) {
    if (spec.kind() != EnsembleKind::IndependentColumns) {
        throw std::invalid_argument("estimate_projected_sv_tail: requires an independent_columns spec");
    }
    const int d = static_cast<int>(j.size());
    if (d != big_n - n + 1) {
        throw std::invalid_argument("estimate_projected_sv_tail: requires |J| = N - n + 1");
    }
    require_increasing(thresholds);
    const int codim = 2 * d - 1;
    const double scale = std::sqrt(static_cast<double>(codim));

    RealVector x;
    if (fixed_x != nullptr) {
        x = *fixed_x;
        if (x.size() != d) throw std::invalid_argument("estimate_projected_sv_tail: x has wrong dimension");
    } else {
        x = RealVector::Constant(d, 1.0 / std::sqrt(static_cast<double>(d)));
    }

    const int nt = static_cast<int>(thresholds.size());
    std::vector<long long> counters;
    long long discards = 0;
    run_trials(trials, threads, 2 * nt + 1,
               [&](std::uint64_t t, std::vector<long long>& c) {
                   RealMatrix a = sample_matrix(spec, big_n, n, RandomSeed{seed.master, seed.stream + t});
                   RealMatrix w = projected_block(a, j);
                   if (static_cast<int>(w.rows()) != codim) {
                       ++c[2 * nt];
                       return;
                   }
                   double sv_min = smallest_singular_value(w);
                   double wx_norm = (w * x).norm();
                   for (int k = 0; k < nt; ++k) {
                       double level = thresholds[k] * scale;
                       if (sv_min <= level) ++c[k];
                       if (wx_norm <= level) ++c[nt + k];
                   }
               },
               counters, discards);

    ProjectedTailResult out;
    out.codimension = codim;
    out.codimension_failures = counters[2 * nt];
    for (int k = 0; k < nt; ++k) {
        out.sv_tail.push_back(make_estimate(trials, counters[k], discards, seed.master));
        out.fixed_x_tail.push_back(make_estimate(trials, counters[nt + k], discards, seed.master));
    }
    return out;
}

EventCoverReport verify_event_cover(const EnsembleSpec& spec, int big_n, int n, double epsilon,
                                    double c1, long long trials, RandomSeed seed, int threads,
                                    int spread_samples_per_trial) {
    if (spec.kind() != EnsembleKind::IndependentColumns) {
        throw std::invalid_argument("verify_event_cover: requires an independent_columns spec");
    }
    if (c1 < 1.0) throw std::invalid_argument("verify_event_cover: requires C1 >= 1");
    const int d = big_n - n + 1;
    if (d < 1) throw std::invalid_argument("verify_event_cover: requires N >= n");
    std::vector<int> j(d);
    for (int i = 0; i < d; ++i) j[i] = i;
    const double sqrt_d = std::sqrt(static_cast<double>(d));
    const double hs_top = c1 * std::sqrt(static_cast<double>(big_n) * n);
    const int bands = static_cast<int>(std::ceil(std::log2(hs_top / d)));
    SpreadParams spread{0.1, 10.0, d};

    std::vector<long long> counters;
    long long discards = 0;
    run_trials(trials, threads, 2,
               [&](std::uint64_t t, std::vector<long long>& c) {
                   CounterRng rng(RandomSeed{seed.master, seed.stream + t});
                   RealMatrix a = detail::sample_matrix_with(spec, big_n, n, rng);
                   RealMatrix w = projected_block(a, j);
                   double hs = hs_norm(w);
                   double inf_est = std::numeric_limits<double>::infinity();
                   for (int s = 0; s < spread_samples_per_trial; ++s) {
                       RealVector x = random_spread_unit(d, spread, rng);
                       inf_est = std::min(inf_est, (w * x).norm());
                   }
                   bool small_inf = inf_est <= epsilon * sqrt_d;
                   if (!small_inf) return;
                   ++c[0];
                   bool covered = false;
                   if (hs < c1 * d) covered = true;  // E_1
                   for (int i = 0; !covered && i <= bands; ++i) {
                       double lo = c1 * std::ldexp(static_cast<double>(d), i);
                       double hi = c1 * std::ldexp(static_cast<double>(d), i + 1);
                       if (hs >= lo && hs < hi && inf_est <= std::ldexp(epsilon, i) * sqrt_d) {
                           covered = true;  // E_{2,i}
                       }
                   }
                   if (!covered && hs >= hs_top) covered = true;  // E_3
                   if (!covered) ++c[1];
               },
               counters, discards);

    EventCoverReport report;
    report.samples = trials;
    report.event_count = counters[0];
    report.violations = counters[1];
    report.discarded_degenerate = discards;
    return report;
}

MomentReport verify_rounding_moment(const RealMatrix& a, const RealVector& y, double epsilon,
                                    long long trials, RandomSeed seed) {
    if (a.cols() != y.size()) throw std::invalid_argument("verify_rounding_moment: dimension mismatch");
    if (trials < 2) throw std::invalid_argument("verify_rounding_moment: requires trials >= 2");
    const double n = static_cast<double>(y.size());
    double mean = 0.0, m2 = 0.0;
    CounterRng rng(seed);
    for (long long t = 0; t < trials; ++t) {
        RoundingOutcome round = detail::random_round_with(y, epsilon, rng);
        double value = (a * (y - round.eta)).squaredNorm();
        double delta = value - mean;
        mean += delta / static_cast<double>(t + 1);
        m2 += delta * (value - mean);
    }
    MomentReport report;
    report.trials = trials;
    report.empirical_mean = mean;
    double hs = hs_norm(a);
    report.bound = epsilon * epsilon / n * hs * hs;
    report.std_error = std::sqrt(m2 / (static_cast<double>(trials - 1) * trials));
    return report;
}

SparsityReport verify_sparsity_prob(const RealVector& y, const DecompositionParams& params,
                                    RandomSeed seed, long long trials) {
    if (y.size() != params.n) throw std::invalid_argument("verify_sparsity_prob: dimension mismatch");
    SparsityReport report;
    report.m = params.sparsity_budget();
    long long hits = 0;
    for (long long t = 0; t < trials; ++t) {
        RoundingOutcome round =
            random_round(y, params.epsilon, RandomSeed{seed.master, seed.stream + static_cast<std::uint64_t>(t)});
        if (round.support_size <= report.m) ++hits;
    }
    report.in_sparse = make_estimate(trials, hits, 0, seed.master);
    return report;
}

RealVector random_unit_vector(int n, CounterRng& rng) {
    RealVector x(n);
    double norm_sq = 0.0;
    do {
        for (int i = 0; i < n; ++i) x(i) = rng.next_gaussian();
        norm_sq = x.squaredNorm();
    } while (norm_sq == 0.0);
    return x / std::sqrt(norm_sq);
}

RealVector random_compressible_unit(int n, double delta, double rho, CounterRng& rng) {
    int k = static_cast<int>(std::floor(delta * n));
    if (k < 1) throw std::invalid_argument("random_compressible_unit: floor(delta n) must be >= 1");
    std::vector<int> indices(n);
    for (int i = 0; i < n; ++i) indices[i] = i;
    for (int i = n - 1; i > 0; --i) {
        int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
        std::swap(indices[i], indices[j]);
    }
    double tail_norm = 0.9 * rho;
    double head_norm = std::sqrt(1.0 - tail_norm * tail_norm);
    RealVector head = random_unit_vector(k, rng);
    RealVector x = RealVector::Zero(n);
    for (int i = 0; i < k; ++i) x(indices[i]) = head_norm * head(i);
    if (n > k) {
        RealVector tail = random_unit_vector(n - k, rng);
        for (int i = k; i < n; ++i) x(indices[i]) = tail_norm * tail(i - k);
    }
    return x;
}

RealVector random_spread_unit(int d, const SpreadParams& params, CounterRng& rng) {
    for (int attempt = 0; attempt < 100000; ++attempt) {
        RealVector x = random_unit_vector(d, rng);
        if (is_spread(x, params)) return x;
    }
    throw std::runtime_error("random_spread_unit: rejection sampling failed");
}

}  // namespace svtail
