#pragma once

// {2,3,5,7}-smoothness sieving over the sequences, an exact largest-prime-
// factor routine (trial division below 10^6, then Brent-cycle rho with
// strong-pseudoprime certification), and the largest-prime-factor threshold
// spot checks. The sweep shards by order k over a work pool; an append-only
// checkpoint file of "k n status" lines makes interrupted sweeps resumable.

#include <gmpxx.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "klucas/bounds.hpp"
#include "klucas/errors.hpp"
#include "klucas/parallel.hpp"
#include "klucas/sequence.hpp"

namespace klucas {

struct SmoothFactorization {
    unsigned long a = 0, b = 0, c = 0, d = 0;  // exponents of 2, 3, 5, 7
    mpz_class remainder;                       // coprime to 2*3*5*7
};

// Strips every factor of the four given primes out of N by exact division.
inline SmoothFactorization smooth_part(const mpz_class& N,
                                       const std::array<unsigned long, 4>& primes = {2, 3, 5,
                                                                                     7}) {
    if (N <= 0) throw std::domain_error("smooth_part: N must be positive");
    SmoothFactorization f;
    f.remainder = N;
    unsigned long* exps[4] = {&f.a, &f.b, &f.c, &f.d};
    for (int i = 0; i < 4; ++i) {
        mpz_class p(primes[static_cast<std::size_t>(i)]);
        *exps[i] = mpz_remove(f.remainder.get_mpz_t(), f.remainder.get_mpz_t(), p.get_mpz_t());
    }
    return f;
}

// A sporadic solution: a term with index past the initial power-of-two
// family (n >= k+1) whose factorization terminates at remainder 1.
struct SolutionRecord {
    int k = 0;
    long n = 0;
    mpz_class value;
    SmoothFactorization factorization;
};

namespace detail {

// All smooth terms of one order, ascending n over [k+1, n_hi].
inline std::vector<SolutionRecord> search_shard(int k, long n_hi) {
    std::vector<SolutionRecord> out;
    KParams p(k);
    if (n_hi < k + 1) return out;
    TermStream ts(p, k + 1, n_hi);
    long n = 0;
    mpz_class v;
    while (ts.next(n, v)) {
        SmoothFactorization f = smooth_part(v);
        if (f.remainder == 1) out.push_back({k, n, v, std::move(f)});
    }
    return out;
}

}  // namespace detail

// Sweeps k in [k_lo, k_hi], n in [k+1, n_hi_fn(k)]; records are returned in
// ascending (k, n) order.
template <typename NHiFn>
std::vector<SolutionRecord> search(int k_lo, int k_hi, NHiFn&& n_hi_fn,
                                   int workers = default_worker_count()) {
    if (k_lo < 2 || k_hi < k_lo) throw std::domain_error("search: need 2 <= k_lo <= k_hi");
    std::vector<std::vector<SolutionRecord>> per_k(static_cast<std::size_t>(k_hi - k_lo + 1));
    parallel_for(k_lo, static_cast<long>(k_hi) + 1, workers, [&](long k) {
        per_k[static_cast<std::size_t>(k - k_lo)] =
            detail::search_shard(static_cast<int>(k), n_hi_fn(static_cast<int>(k)));
    });
    std::vector<SolutionRecord> out;
    for (auto& shard : per_k)
        for (auto& r : shard) out.push_back(std::move(r));
    return out;
}

// Append-only sweep journal. Lines are "k n smooth" for each found record
// and "k 0 done" once a shard completes; a shard's records always precede
// its done marker and are flushed together, so a torn tail only loses the
// marker and the shard is recomputed on resume. Malformed lines are ignored
// for the same reason.
class SearchCheckpoint {
public:
    explicit SearchCheckpoint(const std::string& path) : path_(path) {
        std::ifstream in(path_);
        std::string line;
        while (std::getline(in, line)) {
            std::istringstream ls(line);
            long k = 0, n = 0;
            std::string status;
            if (!(ls >> k >> n >> status)) continue;
            if (status == "smooth")
                found_[static_cast<int>(k)].insert(n);
            else if (status == "done")
                done_.insert(static_cast<int>(k));
        }
        out_ = std::fopen(path_.c_str(), "a");
        if (!out_) throw std::runtime_error("checkpoint: cannot open " + path_);
    }

    ~SearchCheckpoint() {
        if (out_) std::fclose(out_);
    }
    SearchCheckpoint(const SearchCheckpoint&) = delete;
    SearchCheckpoint& operator=(const SearchCheckpoint&) = delete;

    bool shard_done(int k) const { return done_.count(k) != 0; }

    // Smooth indices journaled for a completed shard.
    std::vector<long> recorded(int k) const {
        auto it = found_.find(k);
        if (it == found_.end()) return {};
        return std::vector<long>(it->second.begin(), it->second.end());
    }

    void record_shard(int k, const std::vector<long>& ns) {
        std::lock_guard<std::mutex> lock(mu_);
        for (long n : ns) std::fprintf(out_, "%d %ld smooth\n", k, n);
        std::fprintf(out_, "%d 0 done\n", k);
        std::fflush(out_);
        fsync(fileno(out_));
    }

private:
    std::string path_;
    std::map<int, std::set<long>> found_;
    std::set<int> done_;
    FILE* out_ = nullptr;
    std::mutex mu_;
};

struct CheckpointedSearch {
    std::vector<SolutionRecord> records;
    int shards_restored = 0;
    int shards_run = 0;
};

// Resumable sweep: shards already marked done in the journal are
// reconstructed from their recorded indices (values recomputed exactly);
// the rest run and are journaled. Bounds must match across resumed runs.
template <typename NHiFn>
CheckpointedSearch search_checkpointed(int k_lo, int k_hi, NHiFn&& n_hi_fn,
                                       const std::string& checkpoint_path,
                                       int workers = default_worker_count()) {
    if (k_lo < 2 || k_hi < k_lo)
        throw std::domain_error("search_checkpointed: need 2 <= k_lo <= k_hi");
    SearchCheckpoint cp(checkpoint_path);
    CheckpointedSearch out;
    std::vector<std::vector<SolutionRecord>> per_k(static_cast<std::size_t>(k_hi - k_lo + 1));
    std::vector<long> pending;
    for (int k = k_lo; k <= k_hi; ++k) {
        if (!cp.shard_done(k)) {
            pending.push_back(k);
            continue;
        }
        ++out.shards_restored;
        auto& shard = per_k[static_cast<std::size_t>(k - k_lo)];
        KParams p(k);
        for (long n : cp.recorded(k)) {
            if (n > n_hi_fn(k)) continue;
            mpz_class v = term(p, n);
            SmoothFactorization f = smooth_part(v);
            shard.push_back({k, n, v, std::move(f)});
        }
    }
    parallel_for(0, static_cast<long>(pending.size()), workers, [&](long i) {
        int k = static_cast<int>(pending[static_cast<std::size_t>(i)]);
        auto shard = detail::search_shard(k, n_hi_fn(k));
        std::vector<long> ns;
        for (const auto& r : shard) ns.push_back(r.n);
        cp.record_shard(k, ns);
        per_k[static_cast<std::size_t>(k - k_lo)] = std::move(shard);
    });
    out.shards_run = static_cast<int>(pending.size());
    for (auto& shard : per_k)
        for (auto& r : shard) out.records.push_back(std::move(r));
    return out;
}

namespace detail {

inline const std::vector<unsigned long>& small_primes() {
    static const std::vector<unsigned long> primes = [] {
        const std::size_t limit = 1000000;
        std::vector<bool> composite(limit, false);
        std::vector<unsigned long> out;
        for (std::size_t p = 2; p < limit; ++p) {
            if (composite[p]) continue;
            out.push_back(static_cast<unsigned long>(p));
            for (std::size_t q = p * p; q < limit; q += p) composite[q] = true;
        }
        return out;
    }();
    return primes;
}

// Brent's cycle-based rho on an odd composite n with no factors below 10^6.
// Returns a nontrivial factor, or 0 once the iteration budget is spent.
inline mpz_class brent_rho(const mpz_class& n, unsigned long budget) {
    unsigned long used = 0;
    for (unsigned long c = 1; c <= 16 && used < budget; ++c) {
        mpz_class y(2), g(1), q(1), x, ys;
        unsigned long r = 1;
        const unsigned long batch = 128;
        while (g == 1 && used < budget) {
            x = y;
            for (unsigned long i = 0; i < r; ++i) y = (y * y + c) % n;
            used += r;
            for (unsigned long done = 0; done < r && g == 1; done += batch) {
                ys = y;
                unsigned long steps = std::min(batch, r - done);
                for (unsigned long i = 0; i < steps; ++i) {
                    y = (y * y + c) % n;
                    q = q * abs(x - y) % n;
                }
                used += steps;
                mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
            }
            r *= 2;
        }
        if (g == n) {
            // The batched gcd overshot the meeting point; replay stepwise.
            do {
                ys = (ys * ys + c) % n;
                mpz_class d = abs(x - ys);
                mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
            } while (g == 1);
        }
        if (g != 1 && g != n) return g;
    }
    return 0;
}

inline void factor_into(const mpz_class& n, unsigned long budget, std::vector<mpz_class>& out) {
    if (n == 1) return;
    if (mpz_probab_prime_p(n.get_mpz_t(), 32) > 0) {
        out.push_back(n);
        return;
    }
    mpz_class d = brent_rho(n, budget);
    if (d == 0)
        throw resource_error("largest_prime_factor: unfactored cofactor " + n.get_str());
    factor_into(d, budget, out);
    factor_into(n / d, budget, out);
}

}  // namespace detail

// P(N): the largest prime factor of |N|, with P(0) = P(1) = 1. Factors
// below 10^6 come off by trial division; any remaining cofactor is split by
// Brent-cycle rho, each piece certified by a strong pseudoprime test.
inline mpz_class largest_prime_factor(const mpz_class& N,
                                      unsigned long rho_budget = 1UL << 26) {
    mpz_class n = abs(N);
    if (n <= 1) return 1;
    mpz_class best = 1;
    if (mpz_probab_prime_p(n.get_mpz_t(), 32) > 0) return n;
    for (unsigned long p : detail::small_primes()) {
        if (mpz_class(p) * p > n) break;
        if (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
            best = p;
            mpz_class pz(p);
            mpz_remove(n.get_mpz_t(), n.get_mpz_t(), pz.get_mpz_t());
        }
    }
    if (n == 1) return best;
    std::vector<mpz_class> rest;
    detail::factor_into(n, rho_budget, rest);
    for (const mpz_class& p : rest) best = std::max(best, p);
    return best;
}

struct T11Report {
    long pairs = 0;
    long passed = 0;    // threshold comparison certified
    long factored = 0;  // exact P computed within budget
    long skipped = 0;   // factoring budget exhausted (pass still certified)
    bool all_pass = false;
    double min_ratio = std::numeric_limits<double>::infinity();  // P / threshold, factored pairs
    int min_k = 0;
    long min_n = 0;
};

// Checks P(L_n) > (1/86) log log n over k in [k_lo, k_hi], n in [k+1, n_hi].
// Any term >= 2 has P >= 2, so the comparison is certified even when the
// exact factorization exceeds the budget; such pairs only lose their margin
// statistic.
inline T11Report verify_t11(int k_lo, int k_hi, long n_hi,
                            int workers = default_worker_count(),
                            unsigned long rho_budget = 1UL << 26) {
    if (k_lo < 2 || k_hi < k_lo) throw std::domain_error("verify_t11: need 2 <= k_lo <= k_hi");
    if (n_hi < k_lo + 1) throw std::domain_error("verify_t11: need n_hi >= k_lo+1");
    T11Report rep;
    rep.all_pass = true;
    std::mutex mu;
    parallel_for(k_lo, static_cast<long>(k_hi) + 1, workers, [&](long kl) {
        int k = static_cast<int>(kl);
        if (n_hi < k + 1) return;
        KParams p(k);
        TermStream ts(p, k + 1, n_hi);
        long n = 0;
        mpz_class v;
        T11Report local;
        local.all_pass = true;
        while (ts.next(n, v)) {
            double threshold = prime_factor_threshold(static_cast<double>(n));
            bool certified = v >= 2 && threshold < 2.0;
            mpz_class P;
            bool have_p = false;
            try {
                P = largest_prime_factor(v, rho_budget);
                have_p = true;
            } catch (const resource_error&) {
                ++local.skipped;
            }
            if (have_p) {
                ++local.factored;
                certified = P.get_d() > threshold;
                double ratio = P.get_d() / threshold;
                if (ratio < local.min_ratio) {
                    local.min_ratio = ratio;
                    local.min_k = k;
                    local.min_n = n;
                }
            }
            ++local.pairs;
            if (certified)
                ++local.passed;
            else
                local.all_pass = false;
        }
        std::lock_guard<std::mutex> lock(mu);
        rep.pairs += local.pairs;
        rep.passed += local.passed;
        rep.factored += local.factored;
        rep.skipped += local.skipped;
        rep.all_pass = rep.all_pass && local.all_pass;
        if (local.min_ratio < rep.min_ratio) {
            rep.min_ratio = local.min_ratio;
            rep.min_k = local.min_k;
            rep.min_n = local.min_n;
        }
    });
    return rep;
}

}  // namespace klucas
