#pragma once

#include <span>
#include <string>

#include "lmbias/eventstudy/eventstudy.hpp"

namespace lmbias::eventstudy {

// 0.014 → "1.40%"; values that round to zero print as "0.00%".
std::string format_percent(double value);

// Percent plus significance stars, e.g. "-1.15%**".
std::string format_snapshot(const HorizonSnapshot& snap);

// One table per group with a row per model and a column per horizon, then
// the "*: p<.1, **: p<.05" footnote.
std::string render_car_tables(std::span<const EventStudyResult> results);

// car_table.csv: model_id,group,horizon,car,car_pct,t,p,stars,n
std::string car_table_csv(std::span<const EventStudyResult> results);

// car_path.csv: model_id,day,positive,neutral,negative,spread
std::string car_path_csv(std::span<const EventStudyResult> results, int max_day = 60);

}  // namespace lmbias::eventstudy
