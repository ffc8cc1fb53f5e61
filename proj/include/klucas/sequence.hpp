#pragma once

// k-generalized Lucas numbers: order-k recurrence L_n = L_{n-1} + ... + L_{n-k}
// seeded by L_{2-k} = ... = L_{-1} = 0, L_0 = 2, L_1 = 1.
//
// Terms are produced by a sliding window (ring buffer of the last k terms plus
// their running sum), so advancing costs two big-integer additions regardless
// of k. Nothing is memoized; streams are the intended bulk interface.

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <vector>

namespace klucas {

struct KParams {
    int k;

    explicit KParams(int order) : k(order) {
        if (k < 2) throw std::domain_error("recurrence order k must be >= 2");
    }
};

// Seed value for indices n <= 1; valid for n >= 2-k.
inline mpz_class seed_term(const KParams& p, long n) {
    if (n < 2 - static_cast<long>(p.k))
        throw std::domain_error("index below seed range: n < 2-k");
    if (n > 1) throw std::domain_error("seed_term called past the seed range");
    if (n == 0) return mpz_class(2);
    if (n == 1) return mpz_class(1);
    return mpz_class(0);
}

// Window over the last k terms, positioned at a head index n >= 1.
class SequenceWindow {
public:
    explicit SequenceWindow(KParams p)
        : k_(p.k), n_(1), base_(0), buf_(static_cast<std::size_t>(p.k)), sum_(3) {
        // window covers L_{2-k} .. L_1 = (0, ..., 0, 2, 1)
        buf_[static_cast<std::size_t>(k_ - 2)] = 2;
        buf_[static_cast<std::size_t>(k_ - 1)] = 1;
    }

    int order() const { return k_; }
    long head() const { return n_; }

    // L_{head}
    const mpz_class& value() const { return buf_[(base_ + static_cast<std::size_t>(k_) - 1) % buf_.size()]; }

    // Running sum of the window, i.e. L_{head+1}.
    const mpz_class& window_sum() const { return sum_; }

    void advance() {
        mpz_class& oldest = buf_[base_];
        mpz_class next = sum_;        // L_{n+1} = L_n + ... + L_{n-k+1}
        sum_ += next;
        sum_ -= oldest;
        oldest = std::move(next);     // slot of the dropped term becomes the head slot
        base_ = (base_ + 1) % buf_.size();
        ++n_;
    }

private:
    int k_;
    long n_;
    std::size_t base_;
    std::vector<mpz_class> buf_;
    mpz_class sum_;
};

// Single term L_n; n >= 2-k. Walks the window, O(n) additions.
inline mpz_class term(const KParams& p, long n) {
    if (n <= 1) return seed_term(p, n);
    SequenceWindow w(p);
    while (w.head() < n) w.advance();
    return w.value();
}

// Ordered stream of (n, L_n) for n in [n_lo, n_hi].
class TermStream {
public:
    TermStream(KParams p, long n_lo, long n_hi) : p_(p), w_(p), next_(n_lo), hi_(n_hi) {
        if (n_lo < 2 - static_cast<long>(p.k))
            throw std::domain_error("stream start below seed range: n < 2-k");
        while (w_.head() < next_ - 1) w_.advance();  // no-op while next_ <= 1
    }

    // Emits the next term; returns false once the range is exhausted.
    bool next(long& n, mpz_class& value) {
        if (next_ > hi_) return false;
        n = next_;
        if (next_ <= 1) {
            value = seed_term(p_, next_);
        } else {
            while (w_.head() < next_) w_.advance();
            value = w_.value();
        }
        ++next_;
        return true;
    }

private:
    KParams p_;
    SequenceWindow w_;
    long next_;
    long hi_;
};

struct IdentityReport {
    bool passed = true;
    long terms_checked = 0;
    long first_failure_n = -1;
    std::string failed_family;
};

// Checks the closed forms tied to the head of the sequence:
//   L_n = 3*2^(n-2)            for 2 <= n <= k
//   L_{k+1} = 3*2^(k-1) - 2
//   L_n < 3*2^(n-2)            for k+1 <= n <= n_hi
inline IdentityReport check_identities(const KParams& p, long n_hi) {
    if (n_hi < 2) throw std::domain_error("identity check needs n_hi >= 2");
    IdentityReport rep;
    TermStream s(p, 2, n_hi);
    long n;
    mpz_class v, bound;
    auto fail = [&](long at, const char* family) {
        if (rep.passed) {
            rep.passed = false;
            rep.first_failure_n = at;
            rep.failed_family = family;
        }
    };
    while (s.next(n, v)) {
        bound = 3;
        mpz_mul_2exp(bound.get_mpz_t(), bound.get_mpz_t(), static_cast<mp_bitcnt_t>(n - 2));
        if (n <= p.k) {
            if (v != bound) fail(n, "power-of-two head");
        } else {
            if (n == p.k + 1 && v != bound - 2) fail(n, "first post-head term");
            if (v >= bound) fail(n, "strict upper envelope");
        }
        ++rep.terms_checked;
    }
    return rep;
}

}  // namespace klucas
