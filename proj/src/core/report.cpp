#include "core/report.hpp"

#include "core/csv.hpp"
#include "core/errors.hpp"

#include <algorithm>
#include <sstream>

namespace eventalpha {

namespace {

// Labels contain '/', which downstream spreadsheet tooling mangles when
// unquoted; force quotes on it as well as the RFC-4180 set.
constexpr std::string_view kLabelQuoteChars = "/";

void sort_rows(std::vector<MetricsRow>& rows) {
    std::sort(rows.begin(), rows.end(), [](const MetricsRow& a, const MetricsRow& b) {
        if (a.sharpe_ratio != b.sharpe_ratio) return a.sharpe_ratio > b.sharpe_ratio;
        return a.label < b.label;
    });
}

std::string ic_text(const std::optional<double>& ic) {
    return ic ? fmt_fixed(*ic, 4) : std::string("NA");
}

} // namespace

std::string render_metrics_table(std::vector<MetricsRow> rows, TableFormat format) {
    if (rows.empty()) fail_validation("EmptyTable", "metrics table needs at least one row");
    sort_rows(rows);
    std::ostringstream out;
    if (format == TableFormat::csv) {
        out << "Label,Samples,MeanRet,StdRet,IC,Sharpe,p-value,Sig\n";
        for (const auto& r : rows) {
            std::vector<std::string> fields = {r.label.name,
                                               std::to_string(r.n),
                                               fmt_fixed(r.mean_ret, 4),
                                               fmt_fixed(r.std_ret, 4),
                                               ic_text(r.ic),
                                               fmt_fixed(r.sharpe_ratio, 4),
                                               fmt_fixed(r.p_value, 4),
                                               r.stars};
            write_csv_row(out, fields, kLabelQuoteChars);
        }
    } else {
        out << "| Label | Samples | MeanRet | StdRet | IC | Sharpe | p-value | Sig |\n";
        out << "|---|---:|---:|---:|---:|---:|---:|---|\n";
        for (const auto& r : rows)
            out << "| " << r.label.name << " | " << r.n << " | " << fmt_fixed(r.mean_ret, 4)
                << " | " << fmt_fixed(r.std_ret, 4) << " | " << ic_text(r.ic) << " | "
                << fmt_fixed(r.sharpe_ratio, 4) << " | " << fmt_fixed(r.p_value, 4) << " | "
                << r.stars << " |\n";
    }
    return out.str();
}

namespace {

std::optional<MetricsRow> try_metrics_row(std::span<const EventSample> samples,
                                          const EventLabel& label, Horizon h,
                                          PositionMode position, IcMode ic_mode) {
    EventStudyResult study;
    try {
        study = event_study(samples, label, h, position);
    } catch (const Error&) {
        return std::nullopt; // insufficient samples at this horizon
    }
    std::vector<IcPair> pairs;
    for (const EventSample& s : samples) {
        if (!(s.label == label)) continue;
        auto it = s.fwd.find(h.days);
        if (it == s.fwd.end()) continue;
        pairs.push_back(IcPair{s.date, s.exposure, it->second});
    }
    try {
        return metrics_row(label, study.returns, pairs, ic_mode);
    } catch (const Error&) {
        return std::nullopt; // zero variance
    }
}

} // namespace

std::vector<MetricsRow> metrics_for_horizon(std::span<const EventSample> samples,
                                            const Taxonomy& taxonomy, Horizon h,
                                            PositionMode position, IcMode ic_mode) {
    std::vector<MetricsRow> rows;
    for (const EventLabel& label : taxonomy.labels())
        if (auto row = try_metrics_row(samples, label, h, position, ic_mode))
            rows.push_back(std::move(*row));
    sort_rows(rows);
    return rows;
}

std::vector<HorizonCell> metrics_grid(std::span<const EventSample> samples,
                                      const Taxonomy& taxonomy, std::span<const Horizon> horizons,
                                      PositionMode position, IcMode ic_mode) {
    std::vector<HorizonCell> cells;
    for (const EventLabel& label : taxonomy.labels())
        for (Horizon h : horizons) {
            HorizonCell cell;
            cell.label = label;
            cell.horizon = h;
            if (auto row = try_metrics_row(samples, label, h, position, ic_mode)) {
                cell.computable = true;
                cell.row = std::move(*row);
            }
            cells.push_back(std::move(cell));
        }
    return cells;
}

std::string sharpe_by_horizon_csv(std::span<const HorizonCell> cells) {
    std::ostringstream out;
    out << "label,horizon,sharpe,p_value\n";
    for (const auto& c : cells) {
        std::vector<std::string> fields = {
            c.label.name, std::to_string(c.horizon.days),
            c.computable ? fmt_fixed(c.row.sharpe_ratio, 4) : std::string("NA"),
            c.computable ? fmt_fixed(c.row.p_value, 4) : std::string("NA")};
        write_csv_row(out, fields, kLabelQuoteChars);
    }
    return out.str();
}

std::string ic_by_horizon_csv(std::span<const HorizonCell> cells) {
    std::ostringstream out;
    out << "label,horizon,ic\n";
    for (const auto& c : cells) {
        std::vector<std::string> fields = {
            c.label.name, std::to_string(c.horizon.days),
            c.computable && c.row.ic ? fmt_fixed(*c.row.ic, 4) : std::string("NA")};
        write_csv_row(out, fields, kLabelQuoteChars);
    }
    return out.str();
}

} // namespace eventalpha
