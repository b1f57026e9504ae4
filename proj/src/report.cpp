#include "mbtk/report.hpp"

#include <cstdio>
#include <sstream>

namespace mbtk {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Json to_json(const FiniteLocalObject& obj) {
  Json j;
  j["group_order"] = obj.group->order();
  j["group_degree"] = obj.group->degree();
  Json data = Json::array();
  for (const auto& pd : obj.data) {
    Json d;
    d["place"] = pd.place.archimedean() ? Json(pd.place.label) : Json(pd.place.p);
    Json images = Json::array();
    for (ElemId e : pd.hom.gen_images)
      images.push_back(obj.group->perm(e).cycle_string());
    d["generator_images"] = std::move(images);
    d["inertia_generator"] = obj.group->perm(pd.hom.inertia_gen).cycle_string();
    d["disc_exponent"] = pd.hom.disc_exponent;
    d["unramified"] = pd.hom.unramified;
    data.push_back(std::move(d));
  }
  j["data"] = std::move(data);
  return j;
}

Json to_json(const Prediction& pred) {
  Json j;
  j["a"] = pred.a;
  j["b"] = pred.b;
  j["c"] = format_double(pred.c);
  j["c_residue_lowered"] = format_double(pred.c_residue_lowered);
  j["printed_forms_agree"] = pred.printed_forms_agree;
  j["p_max"] = pred.p_max;
  j["tail_rigorous"] = format_double(pred.tail.rigorous);
  j["tail_conditional"] = format_double(pred.tail.conditional);
  j["tail_residue_constant"] = pred.tail.residue_constant;
  j["minimal_kclasses"] = pred.minimal_kclasses;
  return j;
}

Json to_json(const std::vector<TauberianRow>& rows) {
  Json arr = Json::array();
  for (const auto& row : rows) {
    Json j;
    j["x"] = row.x;
    j["partial_sum"] = format_double(row.partial);
    j["partial_sum_exact"] = row.partial_exact;
    j["predicted"] = format_double(row.predicted);
    j["ratio"] = format_double(row.ratio);
    arr.push_back(std::move(j));
  }
  return arr;
}

Json to_json(const std::vector<DecayRow>& rows) {
  Json arr = Json::array();
  for (const auto& row : rows) {
    Json j;
    j["x"] = row.x;
    j["normalized_sum"] = format_double(row.normalized_sum);
    j["exact"] = row.exact;
    arr.push_back(std::move(j));
  }
  return arr;
}

Json to_json(const MomentExperimentReport& rep) {
  Json j;
  j["empirical_mean"] = format_double(rep.empirical_mean);
  j["standard_error"] = format_double(rep.standard_error);
  j["closed_form"] = format_double(rep.closed_form);
  j["closed_form_exact"] = rep.closed_form_exact;
  if (rep.exact_survival) {
    j["exact_reference"] = format_double(*rep.exact_survival);
    j["exact_reference_exact"] = rep.exact_survival_exact;
  }
  j["samples"] = rep.samples;
  j["seed"] = rep.seed;
  j["mode"] = rep.mode;
  j["engine"] = rep.engine;
  return j;
}

Json to_json(const LlnReport& rep) {
  Json j;
  j["samples_per_x"] = rep.samples_per_x;
  j["seed"] = rep.seed;
  j["mode"] = rep.mode;
  j["beta_warning"] = rep.beta_warning;
  Json pts = Json::array();
  for (const auto& pt : rep.points) {
    Json p;
    p["x"] = pt.x;
    p["normalizer"] = format_double(pt.normalizer);
    p["ratio_mean"] = format_double(pt.ratio_mean);
    p["ratio_variance"] = format_double(pt.ratio_variance);
    Json rs = Json::array();
    for (double r : pt.ratios) rs.push_back(format_double(r));
    p["ratios"] = std::move(rs);
    pts.push_back(std::move(p));
  }
  j["points"] = std::move(pts);
  return j;
}

Json to_json(const GrunwaldReport& rep) {
  Json j;
  j["designated_places"] = rep.designated_places;
  j["samples"] = rep.samples;
  j["seed"] = rep.seed;
  Json rows = Json::array();
  for (const auto& row : rep.rows) {
    Json r;
    r["sub_tuple"] = row.sub_tuple;
    r["frequency"] = format_double(row.frequency);
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j;
}

Json to_json(const std::vector<SurvivalGapRow>& rows) {
  Json arr = Json::array();
  for (const auto& row : rows) {
    Json j;
    j["tuple"] = row.tuple;
    j["surjective"] = row.surjective;
    j["plain_kill_exact"] = row.plain_kill_exact;
    j["torsion_kill_exact"] = row.torsion_kill_exact;
    j["survival_structural"] = format_double(row.survival_structural);
    j["survival_closed_form"] = format_double(row.survival_closed_form);
    arr.push_back(std::move(j));
  }
  return arr;
}

std::string tauberian_csv(const std::vector<TauberianRow>& rows) {
  std::ostringstream out;
  out << "x,partial_sum,partial_sum_exact,predicted,ratio\n";
  for (const auto& row : rows)
    out << row.x << ',' << format_double(row.partial) << ','
        << row.partial_exact << ',' << format_double(row.predicted) << ','
        << format_double(row.ratio) << '\n';
  return out.str();
}

std::string coefficients_csv(const std::vector<Rat>& coeffs, long limit) {
  std::ostringstream out;
  out << "n,a_n\n";
  for (long n = 1; n < static_cast<long>(coeffs.size()) && n <= limit; ++n)
    if (coeffs[n] != 0) out << n << ',' << to_string(coeffs[n]) << '\n';
  return out.str();
}

std::string lln_csv(const LlnReport& rep) {
  std::ostringstream out;
  out << "x,normalizer,ratio_mean,ratio_variance\n";
  for (const auto& pt : rep.points)
    out << pt.x << ',' << format_double(pt.normalizer) << ','
        << format_double(pt.ratio_mean) << ','
        << format_double(pt.ratio_variance) << '\n';
  return out.str();
}

}  // namespace mbtk
