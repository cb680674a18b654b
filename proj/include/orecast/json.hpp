#pragma once

#include "orecast/analytics.hpp"
#include "orecast/arima.hpp"
#include "orecast/diagnostics.hpp"
#include "orecast/error.hpp"
#include "orecast/ingest.hpp"
#include "orecast/pipeline.hpp"

#include <json.hpp>

#include <string>

namespace orecast {

/// Insertion-ordered so serialized payloads are byte-stable.
using Json = nlohmann::ordered_json;

/// "2021" for annual data, "2021-03" for monthly.
std::string period_label(const CalendarPoint &p, Frequency freq);

void to_json(Json &j, const CalendarPoint &p);
void to_json(Json &j, const TimeSeries &s);
/// {"code", "message", "field"}; field is null when not set.
Json error_json(const Error &e);

namespace arima {
void to_json(Json &j, const ArimaSpec &s);
void to_json(Json &j, const ForecastResult &f);
} // namespace arima

namespace diagnostics {
void to_json(Json &j, const TestResult &t);
void to_json(Json &j, const BootstrapForecast &b);
void to_json(Json &j, const TestFailure &f);
void to_json(Json &j, const DiagnosticsReport &r);
} // namespace diagnostics

namespace ingest {
void to_json(Json &j, const Notice &n);
void to_json(Json &j, const CleaningReport &r);
} // namespace ingest

namespace analytics {
void to_json(Json &j, const ChartSeries &s);
void to_json(Json &j, const MineralTotal &m);
void to_json(Json &j, const DepartmentStats &s);
} // namespace analytics

namespace pipeline {
void to_json(Json &j, const ForecastRequest &r);
void to_json(Json &j, const SeriesSummary &s);
void to_json(Json &j, const FitSummary &f);
void to_json(Json &j, const PipelineResult &r);
} // namespace pipeline

} // namespace orecast
