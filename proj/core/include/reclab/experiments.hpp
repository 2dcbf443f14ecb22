#pragma once

#include <deque>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace reclab {

using ojson = nlohmann::ordered_json;

/// Numeric cell; +/-inf and NaN become the strings "inf", "-inf", "nan".
ojson num(double x);

struct ReportTable {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<ojson>> rows;

    /// Appends a row and returns its index.
    std::size_t add(std::vector<ojson> row);
    [[nodiscard]] std::string csv() const;
};

struct Verdict {
    std::string claim;
    bool passed = false;
    std::string table;              // table the verdict was computed from
    std::vector<std::size_t> rows;  // cited row indices
    std::string detail;
};

/// Structured experiment result. The JSON body holds no timestamps or
/// worker counts, so identical parameters give identical bytes.
class Report {
public:
    Report() = default;
    explicit Report(std::string id) : id(std::move(id)) {}

    ReportTable& table(const std::string& name, std::vector<std::string> columns);
    [[nodiscard]] const ReportTable& table(const std::string& name) const;
    void verdict(std::string claim, bool passed, const std::string& table,
                 std::vector<std::size_t> rows, std::string detail = {});

    [[nodiscard]] bool passed() const;
    [[nodiscard]] ojson to_json() const;
    static Report from_json(const ojson& doc);
    /// One line per verdict.
    [[nodiscard]] std::string summary() const;

    /// Writes <dir>/<id>.json and, when `tables` is set, <dir>/<id>_<table>.csv.
    void write(const std::filesystem::path& dir, bool tables = true) const;

    std::string id;
    ojson parameters = ojson::object();
    ojson provenance = ojson::object();
    std::deque<ReportTable> tables;  // deque: table references stay valid as tables are added
    std::vector<Verdict> verdicts;
};

struct RunContext {
    unsigned workers = 1;
};

using ExperimentFn = std::function<Report(const ojson& params, const RunContext& ctx)>;

struct ExperimentEntry {
    std::string name;
    std::string summary;
    ojson defaults;
    ExperimentFn run;
};

/// All registered experiments in a fixed order.
const std::vector<ExperimentEntry>& experiment_registry();
/// Throws ConfigError for unknown names.
const ExperimentEntry& find_experiment(const std::string& name);

/// Defaults overlaid with `overrides`. Keys must exist in the defaults and
/// keep their JSON type (numbers stay numbers); objects merge recursively.
ojson merge_parameters(const ojson& defaults, const nlohmann::json& overrides,
                       const std::string& context);

/// Runs one experiment with its defaults overlaid by `overrides`.
Report run_experiment(const std::string& name, const nlohmann::json& overrides = nlohmann::json::object(),
                      const RunContext& ctx = {});

Report run_hierarchy(const RunContext& ctx = {});
Report run_nonlinearity(const RunContext& ctx = {});
Report run_lacunary(int order = 8, const RunContext& ctx = {});
Report run_bbak(const std::vector<int>& dims = {1, 2, 4, 8, 16}, const RunContext& ctx = {});
/// Without h0 each signal uses its registry step; with h0 all use h0.
Report run_difference_property(std::optional<double> h0 = std::nullopt, const RunContext& ctx = {});
Report run_bohr_neugebauer(const RunContext& ctx = {});
Report run_esclangon(const RunContext& ctx = {});
Report run_halfline(const RunContext& ctx = {});
Report run_chirp_integral(const RunContext& ctx = {});

}  // namespace reclab
