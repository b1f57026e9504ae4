#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "mbtk/category.hpp"
#include "mbtk/model.hpp"
#include "mbtk/series.hpp"

namespace mbtk {

using Json = nlohmann::ordered_json;

// Floats print through a fixed %.17g so reports are byte-stable.
std::string format_double(double v);

Json to_json(const FiniteLocalObject& obj);
Json to_json(const Prediction& pred);
Json to_json(const std::vector<TauberianRow>& rows);
Json to_json(const std::vector<DecayRow>& rows);
Json to_json(const MomentExperimentReport& rep);
Json to_json(const LlnReport& rep);
Json to_json(const GrunwaldReport& rep);
Json to_json(const std::vector<SurvivalGapRow>& rows);

std::string tauberian_csv(const std::vector<TauberianRow>& rows);
std::string coefficients_csv(const std::vector<Rat>& coeffs, long limit);
std::string lln_csv(const LlnReport& rep);

}  // namespace mbtk
