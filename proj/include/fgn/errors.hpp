#ifndef FGN_ERRORS_HPP
#define FGN_ERRORS_HPP

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace fgn {

/// A recursion or factorization produced a non-positive variance or pivot.
class NumericalBreakdown : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotPositiveDefinite : public NumericalBreakdown {
public:
    NotPositiveDefinite(Eigen::Index index, double pivot)
        : NumericalBreakdown("matrix is not positive definite: pivot " + std::to_string(pivot) +
                             " at index " + std::to_string(index)),
          index_(index) {}

    Eigen::Index index() const noexcept { return index_; }

private:
    Eigen::Index index_;
};

/// The data cannot identify the model (e.g. zero sample variance).
class DegenerateData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace fgn

#endif
