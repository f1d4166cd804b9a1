#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lmbias/corpus/types.hpp"

namespace lmbias {

struct DocSet {
    std::vector<PerformanceDoc> docs;
    std::vector<std::string> warnings;
};

// docs.jsonl: one JSON object per line. Blank lines are skipped. Throws
// ParseError naming the 1-based line number, ValidationError on duplicate
// (company_id, fiscal_period).
DocSet parse_docs(std::istream& in);
DocSet load_docs(const std::filesystem::path& path);
std::string doc_to_json_line(const PerformanceDoc& doc);

// Exposure rows grouped by company, each list sorted by as_of.
class ExposureStore {
public:
    void add(ExposureVector v);
    const std::vector<ExposureVector>* find(const std::string& company_id) const;
    std::size_t size() const { return count_; }

private:
    std::map<std::string, std::vector<ExposureVector>> by_company_;
    std::size_t count_ = 0;
};

ExposureStore parse_exposures(std::istream& in);
ExposureStore load_exposures(const std::filesystem::path& path);
std::string exposures_header();
std::string exposure_to_csv_row(const ExposureVector& v);

// Latest vector dated strictly before the first day of the announcement
// month, i.e. the prior month-end snapshot.
std::optional<ExposureVector> exposure_at_announcement(const PerformanceDoc& doc,
                                                       const ExposureStore& exposures);

// Per-company daily returns, strictly increasing dates.
class ReturnStore {
public:
    void add(ReturnRecord r);
    const std::vector<ReturnRecord>* find(const std::string& company_id) const;
    std::optional<double> on(const std::string& company_id, const Date& d) const;
    std::size_t size() const { return count_; }

private:
    std::map<std::string, std::vector<ReturnRecord>> by_company_;
    std::size_t count_ = 0;
};

ReturnStore parse_returns(std::istream& in);
ReturnStore load_returns(const std::filesystem::path& path);
std::string return_to_csv_row(const ReturnRecord& r);

class FactorSeries {
public:
    void add(FactorRecord f);
    const FactorRecord* on(const Date& d) const;
    const std::vector<FactorRecord>& rows() const { return rows_; }

private:
    std::vector<FactorRecord> rows_;
};

FactorSeries parse_factors(std::istream& in);
FactorSeries load_factors(const std::filesystem::path& path);
std::string factor_to_csv_row(const FactorRecord& f);

// Shortest round-trippable decimal form.
std::string format_double(double v);

}  // namespace lmbias
