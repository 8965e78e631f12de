#include "fgn/mixture.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace fgn {

namespace {

constexpr const char* kMagic = "fgn-coeff-table";
constexpr const char* kVersion = "v1";

Eigen::Index header_field(const std::string& token, const std::string& key) {
    const std::string prefix = key + "=";
    if (token.rfind(prefix, 0) != 0) throw std::runtime_error("coefficient table header: expected " + prefix);
    std::size_t used = 0;
    const long long value = std::stoll(token.substr(prefix.size()), &used);
    if (used != token.size() - prefix.size()) throw std::runtime_error("coefficient table header: bad " + key);
    return static_cast<Eigen::Index>(value);
}

} // namespace

void save_table(const CoeffTable& table, std::ostream& out) {
    out << kMagic << ' ' << kVersion << " m=" << table.components() << " kmax=" << table.kmax()
        << " grid=" << table.grid_size() << '\n';
    out << std::setprecision(17);
    for (Eigen::Index i = 0; i < table.grid_size(); ++i) {
        out << table.h_grid()(i);
        for (Eigen::Index c = 0; c < table.params().cols(); ++c) out << ' ' << table.params()(i, c);
        out << ' ' << table.objectives()(i) << '\n';
    }
}

CoeffTable load_table(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("coefficient table: missing header");
    std::istringstream header(line);
    std::string magic, version, m_tok, k_tok, g_tok;
    header >> magic >> version >> m_tok >> k_tok >> g_tok;
    if (magic != kMagic || version != kVersion) throw std::runtime_error("coefficient table: bad header");
    const Eigen::Index m = header_field(m_tok, "m");
    const Eigen::Index kmax = header_field(k_tok, "kmax");
    const Eigen::Index grid = header_field(g_tok, "grid");
    if (m < 1 || grid < 2 || kmax < 1) throw std::runtime_error("coefficient table: bad dimensions");

    const Eigen::Index cols = 2 * m - 1;
    Eigen::VectorXd h(grid), objectives(grid);
    Eigen::MatrixXd params(grid, cols);
    for (Eigen::Index i = 0; i < grid; ++i) {
        if (!std::getline(in, line)) {
            throw std::runtime_error("coefficient table: expected " + std::to_string(grid) + " rows, got " +
                                     std::to_string(i));
        }
        std::istringstream row(line);
        row >> h(i);
        for (Eigen::Index c = 0; c < cols; ++c) row >> params(i, c);
        row >> objectives(i);
        std::string extra;
        if (row.fail() || (row >> extra)) {
            throw std::runtime_error("coefficient table: malformed row " + std::to_string(i + 2));
        }
    }
    return CoeffTable(m, kmax, std::move(h), std::move(params), std::move(objectives));
}

void save_table(const CoeffTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    save_table(table, out);
}

CoeffTable load_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    return load_table(in);
}

} // namespace fgn
