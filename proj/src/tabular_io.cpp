#include "lpir/tabular_io.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include "lpir/errors.hpp"

namespace lpir {

namespace {

using nlohmann::json;

const json& require(const json& doc, const char* field) {
  if (!doc.is_object() || !doc.contains(field)) throw ModelError(std::string("missing field '") + field + "'");
  return doc.at(field);
}

double number(const json& value, const std::string& where) {
  if (!value.is_number()) throw ModelError("expected a number at " + where);
  return value.get<double>();
}

Eigen::VectorXd row(const json& value, Eigen::Index n, const std::string& where) {
  if (!value.is_array() || static_cast<Eigen::Index>(value.size()) != n) {
    throw ModelError("expected an array of length " + std::to_string(n) + " at " + where);
  }
  Eigen::VectorXd out(n);
  for (Eigen::Index y = 0; y < n; ++y) out(y) = number(value[static_cast<std::size_t>(y)], where + "[" + std::to_string(y) + "]");
  return out;
}

}  // namespace

TabularMdp mdp_from_json(const json& doc) {
  const double alpha = number(require(doc, "alpha"), "alpha");
  const json& states = require(doc, "states");
  if (!states.is_number_integer() || states.get<long long>() < 1) throw ModelError("'states' must be a positive integer");
  const auto n = static_cast<Eigen::Index>(states.get<long long>());
  const json& actions = require(doc, "actions");
  const json& P = require(doc, "P");
  const json& g = require(doc, "g");
  for (const auto& [name, field] : {std::pair{"actions", &actions}, std::pair{"P", &P}, std::pair{"g", &g}}) {
    if (!field->is_array() || static_cast<Eigen::Index>(field->size()) != n) {
      throw ModelError(std::string("'") + name + "' must be an array with one entry per state");
    }
  }

  std::vector<std::vector<TabularMdp::Action>> table(static_cast<std::size_t>(n));
  for (Eigen::Index x = 0; x < n; ++x) {
    const auto xs = static_cast<std::size_t>(x);
    const std::string at = "[" + std::to_string(x) + "]";
    if (!actions[xs].is_number_integer() || actions[xs].get<long long>() < 1) {
      throw ModelError("actions" + at + " must be a positive integer");
    }
    const auto count = static_cast<std::size_t>(actions[xs].get<long long>());
    if (!P[xs].is_array() || P[xs].size() != count) throw ModelError("P" + at + " must list one row per action");
    if (!g[xs].is_array() || g[xs].size() != count) throw ModelError("g" + at + " must list one entry per action");
    for (std::size_t u = 0; u < count; ++u) {
      const std::string where = at + "[" + std::to_string(u) + "]";
      TabularMdp::Action a;
      a.probability = row(P[xs][u], n, "P" + where);
      if (g[xs][u].is_number()) {
        a.cost = Eigen::VectorXd::Constant(n, g[xs][u].get<double>());
      } else {
        a.cost = row(g[xs][u], n, "g" + where);
      }
      table[xs].push_back(std::move(a));
    }
  }
  return TabularMdp(alpha, std::move(table));
}

json mdp_to_json(const TabularMdp& mdp) {
  json doc;
  doc["alpha"] = mdp.discount();
  doc["states"] = mdp.num_states();
  json actions = json::array(), P = json::array(), g = json::array();
  for (Eigen::Index x = 0; x < mdp.num_states(); ++x) {
    actions.push_back(mdp.num_controls(x));
    json px = json::array(), gx = json::array();
    for (Eigen::Index u = 0; u < mdp.num_controls(x); ++u) {
      const auto& a = mdp.action(x, u);
      px.push_back(std::vector<double>(a.probability.data(), a.probability.data() + a.probability.size()));
      gx.push_back(std::vector<double>(a.cost.data(), a.cost.data() + a.cost.size()));
    }
    P.push_back(std::move(px));
    g.push_back(std::move(gx));
  }
  doc["actions"] = std::move(actions);
  doc["P"] = std::move(P);
  doc["g"] = std::move(g);
  return doc;
}

TabularMdp load_mdp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open MDP file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ModelError("MDP file " + path.string() + ": " + e.what());
  }
  return mdp_from_json(doc);
}

}  // namespace lpir
