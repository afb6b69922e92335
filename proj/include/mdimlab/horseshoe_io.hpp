#pragma once

#include <string>

#include "json.hpp"
#include "mdimlab/horseshoe.hpp"

namespace mdimlab {

// Versioned JSON serialization of horseshoes. All geometric data is written
// as exact rationals ("p/q" strings), so dump -> load -> dump is
// byte-identical. The loader treats the file as the authority: pieces are
// reconstructed exactly as stored and flagged non-canonical when they
// deviate from the derived layout (e.g. hand-edited fixtures).

using Json = nlohmann::ordered_json;

inline constexpr int kHorseshoeSchema = 1;

namespace io_detail {

inline Json rat(const Rational& r) { return rational_to_string(r); }

inline Rational unrat(const Json& j) { return parse_rational(j.get<std::string>()); }

inline Json box_to_json(const RatBox& b) {
  Json j;
  Json lo = Json::array(), hi = Json::array();
  for (const auto& v : b.lo) lo.push_back(rat(v));
  for (const auto& v : b.hi) hi.push_back(rat(v));
  j["lo"] = lo;
  j["hi"] = hi;
  return j;
}

inline RatBox box_from_json(const Json& j) {
  RatBox b;
  for (const auto& v : j.at("lo")) b.lo.push_back(unrat(v));
  for (const auto& v : j.at("hi")) b.hi.push_back(unrat(v));
  return b;
}

inline Json params_to_json(const HorseshoeParams& p) {
  Json j;
  j["n"] = p.n;
  j["k"] = p.k;
  j["delta"] = rat(p.delta);
  j["rho"] = rat(p.rho);
  j["eta"] = rat(p.eta);
  return j;
}

inline HorseshoeParams params_from_json(const Json& j) {
  HorseshoeParams p;
  p.n = j.at("n").get<int>();
  p.k = j.at("k").get<int>();
  p.delta = unrat(j.at("delta"));
  p.rho = unrat(j.at("rho"));
  p.eta = unrat(j.at("eta"));
  p.validate();
  return p;
}

inline Json pseudo_to_json(const PseudoHorseshoe& h) {
  Json j;
  j["type"] = "pseudo_horseshoe";
  j["params"] = params_to_json(h.params);
  Json grid;
  grid["w"] = rat(h.grid.w);
  grid["gap"] = rat(h.grid.gap);
  grid["pitch"] = rat(h.grid.pitch);
  grid["margin"] = rat(h.grid.margin);
  Json rects = Json::array();
  for (const auto& r : h.grid.rects) rects.push_back(box_to_json(r));
  grid["rects"] = rects;
  j["grid"] = grid;
  Json layout;
  layout["strip_width"] = rat(h.strip_width);
  layout["strip_gap"] = rat(h.strip_gap);
  layout["overshoot"] = rat(h.overshoot);
  layout["lateral_shrink"] = rat(h.lateral_shrink);
  layout["slab_height"] = rat(h.slab_height);
  layout["slab_gap"] = rat(h.slab_gap);
  j["layout"] = layout;
  Json pieces = Json::array();
  for (const auto& p : h.pieces) {
    Json pj;
    pj["source"] = p.source;
    pj["target"] = p.target;
    pj["slab"] = box_to_json(p.slab);
    Json scale = Json::array(), offset = Json::array();
    for (const auto& v : p.scale) scale.push_back(rat(v));
    for (const auto& v : p.offset) offset.push_back(rat(v));
    pj["scale"] = scale;
    pj["offset"] = offset;
    pieces.push_back(pj);
  }
  j["pieces"] = pieces;
  return j;
}

inline PseudoHorseshoe pseudo_from_json(const Json& j) {
  if (j.at("type").get<std::string>() != "pseudo_horseshoe")
    throw InvalidParams("horseshoe file: unexpected object type");
  const HorseshoeParams params = params_from_json(j.at("params"));
  PseudoHorseshoe h;
  h.params = params;
  h.grid.params = params;
  const Json& grid = j.at("grid");
  h.grid.w = unrat(grid.at("w"));
  h.grid.gap = unrat(grid.at("gap"));
  h.grid.pitch = unrat(grid.at("pitch"));
  h.grid.margin = unrat(grid.at("margin"));
  for (const auto& r : grid.at("rects")) h.grid.rects.push_back(box_from_json(r));
  const Json& layout = j.at("layout");
  h.strip_width = unrat(layout.at("strip_width"));
  h.strip_gap = unrat(layout.at("strip_gap"));
  h.overshoot = unrat(layout.at("overshoot"));
  h.lateral_shrink = unrat(layout.at("lateral_shrink"));
  h.slab_height = unrat(layout.at("slab_height"));
  h.slab_gap = unrat(layout.at("slab_gap"));
  const long N = static_cast<long>(h.grid.rects.size());
  if (N != params.rect_count()) throw InvalidParams("horseshoe file: rectangle count mismatch");
  for (const auto& pj : j.at("pieces")) {
    MarkovPiece p;
    p.source = pj.at("source").get<int>();
    p.target = pj.at("target").get<int>();
    p.slab = box_from_json(pj.at("slab"));
    for (const auto& v : pj.at("scale")) p.scale.push_back(unrat(v));
    for (const auto& v : pj.at("offset")) p.offset.push_back(unrat(v));
    h.pieces.push_back(std::move(p));
  }
  if (static_cast<long>(h.pieces.size()) != N * N)
    throw InvalidParams("horseshoe file: piece count mismatch");

  const PseudoHorseshoe canonical = build_pseudo_horseshoe(params);
  h.canonical = canonical.grid.rects == h.grid.rects;
  for (std::size_t i = 0; h.canonical && i < h.pieces.size(); ++i) {
    const MarkovPiece& a = h.pieces[i];
    const MarkovPiece& b = canonical.pieces[i];
    h.canonical = a.source == b.source && a.target == b.target && a.slab == b.slab &&
                  a.scale == b.scale && a.offset == b.offset;
  }
  h.rebuild_cache();
  return h;
}

}  // namespace io_detail

inline Json horseshoe_to_json(const PseudoHorseshoe& h) {
  Json j;
  j["schema"] = kHorseshoeSchema;
  j.update(io_detail::pseudo_to_json(h));
  return j;
}

inline Json horseshoe_to_json(const ChainedHorseshoe& ch) {
  Json j;
  j["schema"] = kHorseshoeSchema;
  j["type"] = "chained_horseshoe";
  j["params"] = io_detail::params_to_json(ch.params);
  j["p"] = ch.p;
  j["chart_bound"] = io_detail::rat(ch.chart_bound);
  j["seed"] = ch.seed;
  Json charts = Json::array();
  for (const auto& chart : ch.charts) {
    Json cj;
    Json center = Json::array(), scale = Json::array();
    for (const auto& v : chart.center) center.push_back(io_detail::rat(v));
    for (const auto& v : chart.scale) scale.push_back(io_detail::rat(v));
    cj["center"] = center;
    cj["scale"] = scale;
    charts.push_back(cj);
  }
  j["charts"] = charts;
  Json stages = Json::array();
  for (const auto& st : ch.stages) stages.push_back(io_detail::pseudo_to_json(st));
  j["stages"] = stages;
  return j;
}

inline bool json_is_chained(const Json& j) {
  return j.at("type").get<std::string>() == "chained_horseshoe";
}

inline PseudoHorseshoe horseshoe_from_json(const Json& j) {
  if (j.at("schema").get<int>() != kHorseshoeSchema)
    throw InvalidParams("horseshoe file: unsupported schema version");
  return io_detail::pseudo_from_json(j);
}

inline ChainedHorseshoe chained_from_json(const Json& j) {
  if (j.at("schema").get<int>() != kHorseshoeSchema)
    throw InvalidParams("horseshoe file: unsupported schema version");
  if (!json_is_chained(j)) throw InvalidParams("horseshoe file: not a chained horseshoe");
  ChainedHorseshoe ch;
  ch.params = io_detail::params_from_json(j.at("params"));
  ch.p = j.at("p").get<int>();
  ch.chart_bound = io_detail::unrat(j.at("chart_bound"));
  ch.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& cj : j.at("charts")) {
    ChartMap chart;
    for (const auto& v : cj.at("center")) chart.center.push_back(io_detail::unrat(v));
    for (const auto& v : cj.at("scale")) chart.scale.push_back(io_detail::unrat(v));
    ch.charts.push_back(std::move(chart));
  }
  for (const auto& sj : j.at("stages")) ch.stages.push_back(io_detail::pseudo_from_json(sj));
  if (static_cast<int>(ch.charts.size()) != ch.p ||
      static_cast<int>(ch.stages.size()) != ch.p)
    throw InvalidParams("horseshoe file: stage/chart count mismatch");
  return ch;
}

inline std::string horseshoe_dump(const Json& j) { return j.dump(1) + "\n"; }

}  // namespace mdimlab
