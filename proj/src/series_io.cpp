#include "fgn/series_io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <limits>
#include <locale>
#include <optional>
#include <sstream>

namespace fgn {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::optional<double> parse_number(const std::string& s) {
    if (s.empty()) return std::nullopt;
    double value = 0.0;
    const char* begin = s.data();
    const char* end = begin + s.size();
    if (*begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) return std::nullopt;
    return value;
}

} // namespace

ObservationModel SeriesData::observation_model(Eigen::Index horizon) const {
    ObservationModel obs;
    obs.y = values;
    obs.horizon = horizon;
    obs.precision = has_precision() ? precision
                                    : Eigen::VectorXd::Constant(values.size(),
                                                                std::numeric_limits<double>::infinity());
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (std::isnan(values(i))) {
            obs.precision(i) = 0.0;
            obs.y(i) = 0.0;
        }
    }
    obs.validate();
    return obs;
}

SeriesData read_series(std::istream& in, const std::string& na, const std::string& source) {
    std::vector<double> values, precisions;
    std::string line;
    std::size_t line_no = 0;
    bool seen_data = false;
    int columns = 0;
    Eigen::Index missing = 0;

    while (std::getline(in, line)) {
        ++line_no;
        const std::string content = trim(line);
        if (content.empty() || content[0] == '#') continue;
        const auto fields = split_fields(content);

        const bool is_na = fields[0] == na;
        const auto value = parse_number(fields[0]);
        if (!seen_data && !value && !is_na) continue;  // header
        if (!value && !is_na) throw ParseError(source, line_no, "cannot parse value '" + fields[0] + "'");
        if (fields.size() > 2) throw ParseError(source, line_no, "expected at most two columns");

        const int here = static_cast<int>(fields.size());
        if (seen_data && here != columns) throw ParseError(source, line_no, "inconsistent column count");
        columns = here;
        seen_data = true;

        values.push_back(is_na ? std::numeric_limits<double>::quiet_NaN() : *value);
        missing += is_na ? 1 : 0;
        if (here == 2) {
            const auto d = parse_number(fields[1]);
            if (!d || *d < 0.0) throw ParseError(source, line_no, "noise precision must be a nonnegative number");
            precisions.push_back(is_na ? 0.0 : *d);
        }
    }
    if (values.empty()) throw ParseError(source, line_no, "no data values found");

    SeriesData data;
    data.values = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
    if (columns == 2) {
        data.precision =
            Eigen::Map<const Eigen::VectorXd>(precisions.data(), static_cast<Eigen::Index>(precisions.size()));
    }
    data.missing = missing;
    return data;
}

SeriesData read_series(const std::string& path, const std::string& na) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    return read_series(in, na, path);
}

void write_csv(std::ostream& out, const std::vector<std::string>& header, const Eigen::MatrixXd& columns) {
    if (static_cast<Eigen::Index>(header.size()) != columns.cols()) {
        throw std::invalid_argument("CSV header does not match column count");
    }
    out.imbue(std::locale::classic());
    for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    out << '\n' << std::setprecision(17);
    for (Eigen::Index r = 0; r < columns.rows(); ++r) {
        for (Eigen::Index c = 0; c < columns.cols(); ++c) out << (c ? "," : "") << columns(r, c);
        out << '\n';
    }
}

void write_csv(const std::string& path, const std::vector<std::string>& header, const Eigen::MatrixXd& columns) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_csv(out, header, columns);
}

} // namespace fgn
