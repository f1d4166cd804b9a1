#include "lmbias/corpus/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "lmbias/error.hpp"

namespace lmbias {
namespace {

using nlohmann::json;

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
    return in;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

double parse_number(std::string_view field, std::size_t line_no, std::string_view column) {
    double v = 0.0;
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) {
        throw ParseError(fmt::format("line {}: column '{}': invalid number '{}'", line_no, column, field));
    }
    if (!std::isfinite(v)) {
        throw ValidationError(fmt::format("line {}: column '{}': non-finite value", line_no, column));
    }
    return v;
}

Date parse_date_field(std::string_view field, std::size_t line_no, std::string_view column) {
    try {
        return parse_date(field);
    } catch (const ParseError& e) {
        throw ParseError(fmt::format("line {}: column '{}': {}", line_no, column, e.what()));
    }
}

std::string require_string(const json& obj, const char* key, std::size_t line_no) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        throw ParseError(fmt::format("line {}: missing field '{}'", line_no, key));
    }
    if (!it->is_string()) throw ParseError(fmt::format("line {}: field '{}' must be a string", line_no, key));
    return it->get<std::string>();
}

// Reads the header line and checks it matches exactly.
void expect_header(std::istream& in, const std::string& expected, const char* what) {
    std::string header;
    if (!std::getline(in, header)) throw ParseError(fmt::format("{}: missing header", what));
    strip_cr(header);
    if (header != expected) {
        throw ParseError(fmt::format("{}: expected header '{}', got '{}'", what, expected, header));
    }
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

// ---------------------------------------------------------------- documents

DocSet parse_docs(std::istream& in) {
    DocSet out;
    std::set<std::pair<std::string, std::string>> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(fmt::format("line {}: malformed JSON: {}", line_no, e.what()));
        }
        if (!obj.is_object()) throw ParseError(fmt::format("line {}: expected a JSON object", line_no));

        PerformanceDoc doc;
        doc.company_id = require_string(obj, "company_id", line_no);
        doc.company_name = require_string(obj, "company_name", line_no);
        const auto when = require_string(obj, "announcement_at", line_no);
        doc.fiscal_period = require_string(obj, "fiscal_period", line_no);
        doc.text = require_string(obj, "text", line_no);
        try {
            doc.announcement_at = parse_timestamp(when);
        } catch (const ParseError& e) {
            throw ParseError(fmt::format("line {}: field 'announcement_at': {}", line_no, e.what()));
        }
        if (doc.company_id.empty()) throw ValidationError(fmt::format("line {}: field 'company_id' is empty", line_no));
        if (doc.text.empty()) throw ValidationError(fmt::format("line {}: field 'text' is empty", line_no));
        if (!seen.emplace(doc.company_id, doc.fiscal_period).second) {
            throw ValidationError(fmt::format("line {}: duplicate (company_id, fiscal_period) = ({}, {})",
                                              line_no, doc.company_id, doc.fiscal_period));
        }
        out.docs.push_back(std::move(doc));
    }
    if (out.docs.empty()) out.warnings.emplace_back("no documents found in input");
    return out;
}

DocSet load_docs(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_docs(in);
}

std::string doc_to_json_line(const PerformanceDoc& doc) {
    json obj = json::object();
    obj["company_id"] = doc.company_id;
    obj["company_name"] = doc.company_name;
    obj["announcement_at"] = format_timestamp(doc.announcement_at);
    obj["fiscal_period"] = doc.fiscal_period;
    obj["text"] = doc.text;
    return obj.dump();
}

// ---------------------------------------------------------------- exposures

std::optional<std::size_t> factor_index(std::string_view name) {
    const auto it = std::find(kFactorNames.begin(), kFactorNames.end(), name);
    if (it == kFactorNames.end()) return std::nullopt;
    return static_cast<std::size_t>(it - kFactorNames.begin());
}

double ExposureVector::operator[](std::string_view factor) const {
    const auto idx = factor_index(factor);
    if (!idx) throw std::out_of_range(fmt::format("unknown factor '{}'", factor));
    return values[*idx];
}

void ExposureStore::add(ExposureVector v) {
    auto& rows = by_company_[v.company_id];
    const auto pos = std::lower_bound(rows.begin(), rows.end(), v.as_of,
                                      [](const ExposureVector& e, const Date& d) { return e.as_of < d; });
    if (pos != rows.end() && pos->as_of == v.as_of) {
        throw ValidationError(fmt::format("duplicate exposure row for {} at {}", v.company_id, format_date(v.as_of)));
    }
    rows.insert(pos, std::move(v));
    ++count_;
}

const std::vector<ExposureVector>* ExposureStore::find(const std::string& company_id) const {
    const auto it = by_company_.find(company_id);
    return it == by_company_.end() ? nullptr : &it->second;
}

std::string exposures_header() {
    std::string h = "company_id,as_of";
    for (const auto name : kFactorNames) {
        h += ',';
        h += name;
    }
    return h;
}

ExposureStore parse_exposures(std::istream& in) {
    expect_header(in, exposures_header(), "exposures.csv");
    ExposureStore store;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != 2 + kFactorCount) {
            throw ParseError(fmt::format("line {}: expected {} columns, got {}", line_no, 2 + kFactorCount, fields.size()));
        }
        ExposureVector v;
        v.company_id = std::string(fields[0]);
        if (v.company_id.empty()) throw ValidationError(fmt::format("line {}: empty company_id", line_no));
        v.as_of = parse_date_field(fields[1], line_no, "as_of");
        for (std::size_t k = 0; k < kFactorCount; ++k) {
            v.values[k] = parse_number(fields[2 + k], line_no, kFactorNames[k]);
        }
        store.add(std::move(v));
    }
    return store;
}

ExposureStore load_exposures(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_exposures(in);
}

std::string exposure_to_csv_row(const ExposureVector& v) {
    std::string row = v.company_id + ',' + format_date(v.as_of);
    for (const double x : v.values) {
        row += ',';
        row += format_double(x);
    }
    return row;
}

std::optional<ExposureVector> exposure_at_announcement(const PerformanceDoc& doc,
                                                       const ExposureStore& exposures) {
    const auto* rows = exposures.find(doc.company_id);
    if (rows == nullptr) return std::nullopt;
    const Date bound = first_of_month(doc.announcement_at.date);
    const auto it = std::lower_bound(rows->begin(), rows->end(), bound,
                                     [](const ExposureVector& e, const Date& d) { return e.as_of < d; });
    if (it == rows->begin()) return std::nullopt;
    return *std::prev(it);
}

// ---------------------------------------------------------------- returns

void ReturnStore::add(ReturnRecord r) {
    if (!(r.ret > -1.0) || !std::isfinite(r.ret)) {
        throw ValidationError(fmt::format("return for {} on {} must be finite and > -1", r.company_id,
                                          format_date(r.date)));
    }
    auto& rows = by_company_[r.company_id];
    if (!rows.empty() && !(rows.back().date < r.date)) {
        throw ValidationError(fmt::format("returns for {} not strictly increasing at {}", r.company_id,
                                          format_date(r.date)));
    }
    rows.push_back(std::move(r));
    ++count_;
}

const std::vector<ReturnRecord>* ReturnStore::find(const std::string& company_id) const {
    const auto it = by_company_.find(company_id);
    return it == by_company_.end() ? nullptr : &it->second;
}

std::optional<double> ReturnStore::on(const std::string& company_id, const Date& d) const {
    const auto* rows = find(company_id);
    if (rows == nullptr) return std::nullopt;
    const auto it = std::lower_bound(rows->begin(), rows->end(), d,
                                     [](const ReturnRecord& r, const Date& x) { return r.date < x; });
    if (it == rows->end() || it->date != d) return std::nullopt;
    return it->ret;
}

ReturnStore parse_returns(std::istream& in) {
    expect_header(in, "company_id,date,ret", "returns.csv");
    ReturnStore store;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != 3) throw ParseError(fmt::format("line {}: expected 3 columns, got {}", line_no, fields.size()));
        ReturnRecord r{std::string(fields[0]), parse_date_field(fields[1], line_no, "date"),
                       parse_number(fields[2], line_no, "ret")};
        try {
            store.add(std::move(r));
        } catch (const ValidationError& e) {
            throw ValidationError(fmt::format("line {}: {}", line_no, e.what()));
        }
    }
    return store;
}

ReturnStore load_returns(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_returns(in);
}

std::string return_to_csv_row(const ReturnRecord& r) {
    return r.company_id + ',' + format_date(r.date) + ',' + format_double(r.ret);
}

// ---------------------------------------------------------------- factors

void FactorSeries::add(FactorRecord f) {
    if (!rows_.empty() && !(rows_.back().date < f.date)) {
        throw ValidationError(fmt::format("factor dates not strictly increasing at {}", format_date(f.date)));
    }
    rows_.push_back(f);
}

const FactorRecord* FactorSeries::on(const Date& d) const {
    const auto it = std::lower_bound(rows_.begin(), rows_.end(), d,
                                     [](const FactorRecord& f, const Date& x) { return f.date < x; });
    if (it == rows_.end() || it->date != d) return nullptr;
    return &*it;
}

FactorSeries parse_factors(std::istream& in) {
    expect_header(in, "date,mkt_rf,smb,hml,rmw,cma,rf", "factors.csv");
    FactorSeries series;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 7) throw ParseError(fmt::format("line {}: expected 7 columns, got {}", line_no, f.size()));
        FactorRecord rec{parse_date_field(f[0], line_no, "date"), parse_number(f[1], line_no, "mkt_rf"),
                         parse_number(f[2], line_no, "smb"),      parse_number(f[3], line_no, "hml"),
                         parse_number(f[4], line_no, "rmw"),      parse_number(f[5], line_no, "cma"),
                         parse_number(f[6], line_no, "rf")};
        try {
            series.add(rec);
        } catch (const ValidationError& e) {
            throw ValidationError(fmt::format("line {}: {}", line_no, e.what()));
        }
    }
    return series;
}

FactorSeries load_factors(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_factors(in);
}

std::string factor_to_csv_row(const FactorRecord& f) {
    return fmt::format("{},{},{},{},{},{},{}", format_date(f.date), format_double(f.mkt_rf), format_double(f.smb),
                       format_double(f.hml), format_double(f.rmw), format_double(f.cma), format_double(f.rf));
}

}  // namespace lmbias
