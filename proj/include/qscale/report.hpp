#pragma once

#include "qscale/params.hpp"
#include "qscale/simnet.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace qscale::report {

inline constexpr const char* trace_schema = "qscale-trace/1";
inline constexpr const char* summary_schema = "qscale-summary/1";

/// Column header of the per-round trace CSV.
std::string trace_csv_header();
void write_trace_csv(std::ostream& os, const simnet::RoundTrace& trace);
void write_trace_json(std::ostream& os, const simnet::RoundTrace& trace);

/// Run summary: configuration, safety verdict (with witness), invariant
/// counters, liveness and message statistics.
void write_summary_json(std::ostream& os, const simnet::SimConfig& config, const simnet::RunResult& result);

/// Writes a batch summary: one entry per run plus aggregate statistics.
void write_batch_json(std::ostream& os, const std::vector<simnet::SimConfig>& configs, const simnet::BatchResult& batch);

/// Plain rectangular table rendered as CSV, JSON (array of objects) or a
/// padded text table. Numbers print identically in CSV and JSON.
class Table {
public:
    using Cell = std::variant<std::int64_t, double, std::string, bool>;

    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void add(std::vector<Cell> row);
    const std::vector<std::string>& columns() const { return columns_; }
    const std::vector<std::vector<Cell>>& rows() const { return rows_; }

    void write_csv(std::ostream& os) const;
    void write_json(std::ostream& os) const;
    void write_pretty(std::ostream& os) const;
    void write(std::ostream& os, std::string_view format) const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<Cell>> rows_;
};

/// Shortest text that reads back to the same double.
std::string format_number(double x);

}  // namespace qscale::report
