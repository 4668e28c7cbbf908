#include "jdgsvd/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "jdgsvd/errors.hpp"

namespace jdgsvd {
namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool blank(const std::string& line) {
    return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

long long parse_integer(const std::string& tok, std::size_t line) {
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(tok.c_str(), &end, 10);
    if (errno != 0 || end == tok.c_str() || *end != '\0') throw ParseError("bad integer '" + tok + "'", line);
    return v;
}

double parse_real(const std::string& tok, std::size_t line) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') throw ParseError("bad value '" + tok + "'", line);
    return v;
}

}  // namespace

SparseMatrix parse_matrix_market(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw ParseError("empty input", 1);
    ++lineno;

    std::istringstream header(line);
    std::string banner, object, format, field, symmetry;
    header >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket") throw ParseError("missing %%MatrixMarket banner", lineno);
    object = lower(object);
    format = lower(format);
    field = lower(field);
    symmetry = lower(symmetry);
    if (object != "matrix") throw ParseError("unsupported object '" + object + "'", lineno);
    if (format != "coordinate") throw ParseError("only coordinate format is supported", lineno);
    if (field != "real" && field != "integer" && field != "double") {
        throw ParseError("unsupported field '" + field + "' (need real)", lineno);
    }
    bool symmetric = false;
    if (symmetry == "symmetric") symmetric = true;
    else if (symmetry != "general") throw ParseError("unsupported symmetry '" + symmetry + "'", lineno);

    // Skip comments up to the size line.
    long long rows = -1, cols = -1, entries = -1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '%' || blank(line)) continue;
        std::istringstream sz(line);
        std::string a, b, c, extra;
        if (!(sz >> a >> b >> c) || (sz >> extra)) throw ParseError("malformed size line", lineno);
        rows = parse_integer(a, lineno);
        cols = parse_integer(b, lineno);
        entries = parse_integer(c, lineno);
        break;
    }
    if (rows < 0) throw ParseError("missing size line", lineno + 1);
    if (rows < 0 || cols < 0 || entries < 0) throw ParseError("negative size", lineno);
    if (symmetric && rows != cols) throw ParseError("symmetric matrix must be square", lineno);

    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(symmetric ? 2 * entries : entries));
    long long seen = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '%' || blank(line)) continue;
        if (seen == entries) throw ParseError("more entries than declared", lineno);
        std::istringstream es(line);
        std::string si, sj, sv, extra;
        if (!(es >> si >> sj >> sv) || (es >> extra)) throw ParseError("malformed entry", lineno);
        const long long i = parse_integer(si, lineno);
        const long long j = parse_integer(sj, lineno);
        const double v = parse_real(sv, lineno);
        if (i < 1 || i > rows || j < 1 || j > cols) throw ParseError("index out of bounds", lineno);
        if (symmetric && j > i) throw ParseError("symmetric entry above the diagonal", lineno);
        trips.push_back({static_cast<Index>(i - 1), static_cast<Index>(j - 1), v});
        if (symmetric && i != j) trips.push_back({static_cast<Index>(j - 1), static_cast<Index>(i - 1), v});
        ++seen;
    }
    if (seen != entries) {
        throw ParseError("expected " + std::to_string(entries) + " entries, found " + std::to_string(seen),
                         lineno);
    }
    return SparseMatrix::from_triplets(static_cast<Index>(rows), static_cast<Index>(cols), std::move(trips));
}

SparseMatrix read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'", 0);
    return parse_matrix_market(in);
}

void write_matrix_market(const SparseMatrix& m, std::ostream& out) {
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
    char buf[64];
    const auto& off = m.row_offsets();
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index k = off[i]; k < off[i + 1]; ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", m.values()[k]);
            out << (i + 1) << ' ' << (m.col_indices()[k] + 1) << ' ' << buf << '\n';
        }
    }
}

void write_matrix_market(const SparseMatrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    write_matrix_market(m, out);
}

}  // namespace jdgsvd
