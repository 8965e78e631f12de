#ifndef FGN_SERIES_IO_HPP
#define FGN_SERIES_IO_HPP

#include "fgn/observation.hpp"

#include <Eigen/Core>

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace fgn {

/// Malformed data file; line() is one-based.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// One value per line, optional header line, optional second column with the
/// per-point noise precision. `na` marks a missing value (NaN in values).
struct SeriesData {
    Eigen::VectorXd values;
    Eigen::VectorXd precision;  // empty unless a second column was present
    Eigen::Index missing = 0;

    bool has_precision() const { return precision.size() > 0; }

    /// Missing -> precision 0; otherwise the given precision, or exact when
    /// no precision column was supplied.
    ObservationModel observation_model(Eigen::Index horizon = 0) const;
};

SeriesData read_series(std::istream& in, const std::string& na = "NA", const std::string& source = "<stream>");
SeriesData read_series(const std::string& path, const std::string& na = "NA");

/// CSV with a header row, '.' decimal separator and 17 significant digits.
void write_csv(std::ostream& out, const std::vector<std::string>& header, const Eigen::MatrixXd& columns);
void write_csv(const std::string& path, const std::vector<std::string>& header, const Eigen::MatrixXd& columns);

} // namespace fgn

#endif
