#pragma once

#include "core/backtest.hpp"
#include "core/factor.hpp"
#include "core/stats.hpp"

#include <span>
#include <string>
#include <vector>

namespace eventalpha {

enum class TableFormat { markdown, csv };

// Renders rows in the fixed column order Label, Samples, MeanRet,
// StdRet, IC, Sharpe, p-value, Sig with 4-decimal values, sorted by
// Sharpe descending (ties by label name). Degenerate IC prints "NA".
std::string render_metrics_table(std::vector<MetricsRow> rows, TableFormat format);

// All metrics rows for one horizon; labels with fewer than 2 usable
// samples are omitted (they still show up in the by-horizon files with
// an NA marker).
std::vector<MetricsRow> metrics_for_horizon(std::span<const EventSample> samples,
                                            const Taxonomy& taxonomy, Horizon h,
                                            PositionMode position, IcMode ic_mode);

struct HorizonCell {
    EventLabel label;
    Horizon horizon{1};
    bool computable = false;
    MetricsRow row; // valid when computable
};

std::vector<HorizonCell> metrics_grid(std::span<const EventSample> samples,
                                      const Taxonomy& taxonomy, std::span<const Horizon> horizons,
                                      PositionMode position, IcMode ic_mode);

// label,horizon,sharpe,p_value with NA for insufficient-sample cells.
std::string sharpe_by_horizon_csv(std::span<const HorizonCell> cells);

// label,horizon,ic with NA markers.
std::string ic_by_horizon_csv(std::span<const HorizonCell> cells);

} // namespace eventalpha
