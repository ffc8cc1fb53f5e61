#pragma once

#include <stdexcept>
#include <string>

namespace klucas {

// Raised when a computation exhausts an escalation budget (precision cap,
// retry limit) rather than failing a mathematical check.
class resource_error : public std::runtime_error {
public:
    explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when the enclosure of C*eta straddles an integer, so floor(C*eta)
// cannot be read off the interval. Callers escalate precision and retry.
class ambiguous_floor : public std::runtime_error {
public:
    ambiguous_floor(std::size_t index, const std::string& what)
        : std::runtime_error(what), index_(index) {}
    std::size_t index() const { return index_; }

private:
    std::size_t index_;
};

// Raised when Gram-Schmidt meets a linearly dependent column set.
class rank_error : public std::runtime_error {
public:
    explicit rank_error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when an iterated reduction fails to shrink its bound.
class divergence_error : public std::runtime_error {
public:
    explicit divergence_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace klucas
