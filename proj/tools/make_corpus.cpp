// Regenerates the bundled instance corpus under data/. Deterministic; run it
// after changing a builder or the JSON schema.
#include "logpi1/cdga.hpp"
#include "logpi1/curve_monodromy.hpp"

#include <fstream>
#include <iostream>
#include <string>

using namespace logpi1;

namespace {

void write(const std::string& name, const nlohmann::json& j) {
  const std::string path = std::string(LOGPI1_DATA_DIR) + "/" + name;
  std::ofstream f(path);
  if (!f) {
    std::cerr << "cannot write " << path << "\n";
    std::exit(1);
  }
  f << j.dump(2) << "\n";
  std::cout << path << "\n";
}

curve::DualGraph graph(const std::vector<std::array<int, 3>>& vs,
                       const std::vector<std::array<int, 3>>& es) {
  curve::DualGraph g;
  for (const auto& v : vs) g.vertices.push_back({v[0], v[1], v[2]});
  for (const auto& e : es) g.edges.push_back({e[0], {e[1], e[2]}});
  return g;
}

nlohmann::json instance(const curve::DualGraph& g, const curve::BaseDatum& b, int q) {
  nlohmann::json j = curve::graph_to_json(g);
  j["base"] = curve::base_to_json(b);
  j["q"] = q;
  return j;
}

}  // namespace

int main() {
  // Stock cdga models of curves.
  write("marked_g0_r3.json", cdga::to_json(cdga::marked_curve_model(0, 3)));
  write("marked_g1_r1.json", cdga::to_json(cdga::marked_curve_model(1, 1)));
  write("marked_g1_r2.json", cdga::to_json(cdga::marked_curve_model(1, 2)));
  write("marked_g2_r1.json", cdga::to_json(cdga::marked_curve_model(2, 1)));
  write("unmarked_g1.json", cdga::to_json(cdga::unmarked_curve_model(1)));
  write("unmarked_g2.json", cdga::to_json(cdga::unmarked_curve_model(2)));

  // Two genus-1 components glued at one point: the nontrivial instance.
  write("two_genus1.json",
        instance(graph({{0, 1, 0}, {1, 1, 0}}, {{0, 0, 1}}), curve::tangential_side(0, 0), 4));
  // The same terminals joined through an interior P1.
  write("line_n2.json", instance(graph({{0, 1, 0}, {1, 0, 0}, {2, 1, 0}}, {{0, 0, 1}, {1, 1, 2}}),
                                 curve::tangential_side(0, 0), 4));
  // Y-shaped tree with a marked rational center.
  write("ytree.json",
        instance(graph({{0, 1, 0}, {1, 1, 0}, {2, 1, 0}, {3, 0, 1}},
                       {{0, 0, 3}, {1, 1, 3}, {2, 2, 3}}),
                 curve::good_point(0), 4));
  // Line that splits at a non-rational interior component.
  write("split_line.json",
        instance(graph({{0, 1, 0}, {1, 0, 0}, {2, 1, 0}, {3, 0, 0}, {4, 1, 0}},
                       {{0, 0, 1}, {1, 1, 2}, {2, 2, 3}, {3, 3, 4}}),
                 curve::good_point(0), 4));

  // Loops of length 1, 2, 3.
  write("loop_n1.json", instance(graph({{0, 1, 0}}, {{0, 0, 0}}), curve::tangential_side(0, 0), 4));
  write("loop_n2.json", instance(graph({{0, 1, 0}, {1, 1, 0}}, {{0, 0, 1}, {1, 0, 1}}),
                                 curve::tangential_side(0, 0), 4));
  write("loop_n3.json",
        instance(graph({{0, 1, 0}, {1, 1, 0}, {2, 1, 0}}, {{0, 0, 1}, {1, 1, 2}, {2, 0, 2}}),
                 curve::tangential_side(0, 0), 4));

  // Smooth curves: good section, and a not-good section through a mark.
  write("smooth_good.json", instance(graph({{0, 2, 0}}, {}), curve::good_point(0), 3));
  write("smooth_marked.json", instance(graph({{0, 1, 1}}, {}), curve::marked_point(0, 2), 3));
  return 0;
}
