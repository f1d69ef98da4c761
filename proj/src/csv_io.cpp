#include "fraclap/csv_io.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fraclap {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void CsvTable::add_meta(std::string key, std::string value) { meta.emplace_back(std::move(key), std::move(value)); }

void CsvTable::add_meta(std::string key, double value) { meta.emplace_back(std::move(key), format_double(value)); }

const std::string& CsvTable::meta_value(std::string_view key) const {
    for (const auto& [k, v] : meta)
        if (k == key) return v;
    throw std::out_of_range("missing metadata key '" + std::string(key) + "'");
}

std::size_t CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw std::out_of_range("missing column '" + std::string(name) + "'");
}

void write_csv(std::ostream& out, const CsvTable& table) {
    for (const auto& [k, v] : table.meta) out << "# " << k << " = " << v << "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
    out << "\n";
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size()) throw std::invalid_argument("write_csv: row width differs from header");
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
        out << "\n";
    }
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_csv(out, table);
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

CsvTable read_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find(" = ");
            if (eq == std::string::npos || eq < 2) throw std::runtime_error("read_csv: malformed metadata line: " + line);
            t.meta.emplace_back(line.substr(2, eq - 2), line.substr(eq + 3));
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (!header) {
            t.columns = std::move(fields);
            header = true;
            continue;
        }
        if (fields.size() != t.columns.size()) throw std::runtime_error("read_csv: row width differs from header");
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& s : fields) {
            // strtod keeps subnormals exact where std::stod throws on ERANGE.
            char* end = nullptr;
            const double v = std::strtod(s.c_str(), &end);
            if (s.empty() || end != s.c_str() + s.size()) throw std::runtime_error("read_csv: bad number '" + s + "'");
            row.push_back(v);
        }
        t.rows.push_back(std::move(row));
    }
    if (!header) throw std::runtime_error("read_csv: missing header line");
    return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_csv(in);
}

std::string content_hash(std::string_view content) {
    std::string data = "blob " + std::to_string(content.size());
    data.push_back('\0');
    data.append(content);
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha1(), nullptr) != 1)
        throw std::runtime_error("content_hash: SHA-1 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 15]);
    }
    return out;
}

}  // namespace fraclap
