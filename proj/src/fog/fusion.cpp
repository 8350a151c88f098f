#include "airtrust/fog/fusion.hpp"

#include <cmath>

#include <json.hpp>

#include "airtrust/common/numfmt.hpp"

namespace airtrust::fog {

void RuleSet::normalize() {
    double sum = 0.0;
    for (const auto& r : rules) sum += r.weight;
    if (sum <= 0.0) return;
    for (auto& r : rules) r.weight /= sum;
}

RuleSet default_rules(const RuleConfig& cfg) {
    RuleSet set;

    set.rules.push_back(Rule{
        "implied_speed",
        [cfg](const edge::FeatureVector& fv, const Context&) {
            double reference = std::max(fv.ground_speed_kt, cfg.min_speed_floor_kt);
            return fv.implied_speed_kt > cfg.speed_ratio * reference;
        },
        cfg.w_implied_speed,
        "implied speed inconsistent with reported ground speed"});

    set.rules.push_back(Rule{
        "report_gap",
        [cfg](const edge::FeatureVector& fv, const Context& ctx) {
            double max_gap = cfg.gap_max_s / (ctx.security_level >= 3 ? 2.0 : 1.0);
            return fv.report_gap_s > max_gap || fv.report_gap_s < cfg.gap_min_s;
        },
        cfg.w_report_gap,
        "report spacing outside the plausible single-emitter band"});

    set.rules.push_back(Rule{
        "heading_delta",
        [cfg](const edge::FeatureVector& fv, const Context&) {
            return std::fabs(fv.heading_delta_deg) > cfg.heading_delta_deg;
        },
        cfg.w_heading,
        "heading swing beyond turn capability between reports"});

    set.normalize();
    return set;
}

RuleSet rules_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    RuleConfig cfg;
    cfg.speed_ratio = j.value("speed_ratio", cfg.speed_ratio);
    cfg.min_speed_floor_kt = j.value("min_speed_floor_kt", cfg.min_speed_floor_kt);
    cfg.gap_max_s = j.value("gap_max_s", cfg.gap_max_s);
    cfg.gap_min_s = j.value("gap_min_s", cfg.gap_min_s);
    cfg.heading_delta_deg = j.value("heading_delta_deg", cfg.heading_delta_deg);
    cfg.w_implied_speed = j.value("w_implied_speed", cfg.w_implied_speed);
    cfg.w_report_gap = j.value("w_report_gap", cfg.w_report_gap);
    cfg.w_heading = j.value("w_heading", cfg.w_heading);
    return default_rules(cfg);
}

Context contextualize(const edge::FeatureVector& fv, double clock, const GridConfig& grid) {
    if (!grid.box.contains(fv.last_lat_deg, fv.last_lon_deg))
        throw SectorUnmapped("position outside the configured grid for " + fv.icao);

    double lat_span = (grid.box.lat_max - grid.box.lat_min) / grid.rows;
    double lon_span = (grid.box.lon_max - grid.box.lon_min) / grid.cols;
    int row = static_cast<int>((fv.last_lat_deg - grid.box.lat_min) / lat_span);
    int col = static_cast<int>((fv.last_lon_deg - grid.box.lon_min) / lon_span);
    row = std::min(row, grid.rows - 1);  // top edge belongs to the last sector
    col = std::min(col, grid.cols - 1);

    double second_of_day = std::fmod(clock, 86400.0);
    if (second_of_day < 0) second_of_day += 86400.0;

    Context ctx;
    ctx.time_band = (second_of_day >= grid.day_start_s && second_of_day < grid.day_end_s)
                        ? TimeBand::Day
                        : TimeBand::Night;
    ctx.sector_id = "r" + std::to_string(row) + "c" + std::to_string(col);
    ctx.security_level = grid.security_level;
    return ctx;
}

SuspicionReport score(const edge::FeatureVector& fv, const Context& ctx, const RuleSet& rules,
                      double decided_at) {
    SuspicionReport report;
    report.icao = fv.icao;
    report.first_seen = fv.first_seen;
    report.context = ctx;
    report.decided_at = decided_at;
    for (const auto& rule : rules.rules) {
        if (rule.predicate(fv, ctx)) {
            report.score += rule.weight;
            report.fired_rules.push_back(rule.id);
            report.fired_descriptions.push_back(rule.description);
        }
    }
    return report;
}

std::optional<Alert> decide(const SuspicionReport& report, double threshold) {
    if (threshold <= 0.0 || threshold > 1.0)
        throw std::invalid_argument("threshold must be in (0, 1]");
    if (report.score < threshold) return std::nullopt;

    Alert a;
    a.icao = report.icao;
    a.score = report.score;
    a.threshold = threshold;
    a.first_seen = report.first_seen;
    a.decided_at = report.decided_at;
    a.message = "suspicious aircraft " + report.icao + " score " +
                format_fixed(report.score, 3) + " [";
    for (size_t i = 0; i < report.fired_descriptions.size(); ++i) {
        if (i) a.message += "; ";
        a.message += report.fired_descriptions[i];
    }
    a.message += "]";
    return a;
}

}  // namespace airtrust::fog
