#include "lmbias/eventstudy/render.hpp"

#include <cmath>
#include <map>
#include <set>

#include <fmt/format.h>

#include "lmbias/corpus/io.hpp"

namespace lmbias::eventstudy {

std::string format_percent(double value) {
    auto s = fmt::format("{:.2f}%", value * 100.0);
    if (s == "-0.00%") s = "0.00%";
    return s;
}

std::string format_snapshot(const HorizonSnapshot& snap) {
    if (!snap.car) return "n/a";
    auto s = format_percent(*snap.car);
    if (snap.test) s += snap.test->stars;
    return s;
}

std::string render_car_tables(std::span<const EventStudyResult> results) {
    std::string out;
    for (const auto group : {CarGroup::Positive, CarGroup::Neutral, CarGroup::Negative, CarGroup::Spread}) {
        std::vector<const EventStudyResult*> rows;
        for (const auto& r : results) {
            if (r.group == group) rows.push_back(&r);
        }
        if (rows.empty()) continue;
        out += group == CarGroup::Spread ? "CAR (positive - negative)\n" : fmt::format("CAR ({})\n", car_group_name(group));
        std::size_t name_w = 10;
        for (const auto* r : rows) name_w = std::max(name_w, r->model_id.size() + 2);
        out += fmt::format("{:<{}}", "Model", name_w);
        for (const auto& s : rows.front()->snapshots) {
            out += fmt::format("{:>12}", fmt::format("{}day{}", s.horizon, s.horizon == 1 ? "" : "s"));
        }
        out += '\n';
        for (const auto* r : rows) {
            out += fmt::format("{:<{}}", r->model_id, name_w);
            for (const auto& s : r->snapshots) out += fmt::format("{:>12}", format_snapshot(s));
            out += '\n';
        }
        out += "*: p<.1, **: p<.05\n\n";
    }
    return out;
}

std::string car_table_csv(std::span<const EventStudyResult> results) {
    std::string out = "model_id,group,horizon,car,car_pct,t,p,stars,n\n";
    for (const auto& r : results) {
        for (const auto& s : r.snapshots) {
            out += fmt::format("{},{},{},{},{},{},{},{},{}\n", r.model_id, car_group_name(r.group), s.horizon,
                               s.car ? format_double(*s.car) : "", s.car ? format_percent(*s.car) : "",
                               s.test ? format_double(s.test->statistic) : "", s.test ? format_double(s.test->p_value) : "",
                               s.test ? s.test->stars : "", s.n);
        }
    }
    return out;
}

std::string car_path_csv(std::span<const EventStudyResult> results, int max_day) {
    std::map<std::string, std::map<CarGroup, const EventStudyResult*>> by_model;
    for (const auto& r : results) by_model[r.model_id][r.group] = &r;
    std::string out = "model_id,day,positive,neutral,negative,spread\n";
    for (const auto& [model, groups] : by_model) {
        for (int day = 0; day <= max_day; ++day) {
            out += fmt::format("{},{}", model, day);
            for (const auto g : {CarGroup::Positive, CarGroup::Neutral, CarGroup::Negative, CarGroup::Spread}) {
                out += ',';
                const auto it = groups.find(g);
                if (it != groups.end() && static_cast<std::size_t>(day) < it->second->car_path.size()) {
                    out += format_double(it->second->car_path[static_cast<std::size_t>(day)]);
                }
            }
            out += '\n';
        }
    }
    return out;
}

}  // namespace lmbias::eventstudy
