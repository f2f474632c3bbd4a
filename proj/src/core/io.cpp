#include "core/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "core/error.hpp"

namespace fhm {

namespace {

using nlohmann::json;

std::string fmt17(double v) { return double_to_string(v); }

std::string escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::string word_to_string(const Word& w, int letter_count) {
  std::ostringstream os;
  bool compact = letter_count <= 9;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!compact && i) os << ',';
    os << w[i];
  }
  return os.str();
}

Word word_from_string(const std::string& s) {
  Word w;
  if (s.empty()) return w;
  if (s.find(',') != std::string::npos) {
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, ',')) {
      try {
        w.push_back(std::stoi(tok));
      } catch (...) {
        fail(Errc::parse_error, "bad cell word '" + s + "'");
      }
    }
  } else {
    for (char c : s) {
      if (c < '1' || c > '9') fail(Errc::parse_error, "bad cell word '" + s + "'");
      w.push_back(c - '0');
    }
  }
  return w;
}

Itinerary itinerary_or_die(const std::string& s) {
  auto it = itinerary_from_string(s);
  if (!it) fail(Errc::parse_error, "bad itinerary '" + s + "'");
  return *it;
}

Rat rat_or_die(const std::string& s) {
  auto q = parse_rational(s);
  if (!q) fail(Errc::parse_error, "bad rational '" + s + "'");
  return *q;
}

// wraps to [0,1), same convention as the circle projection
double frac(double v) {
  double y = v - std::floor(v);
  if (y >= 1.0) y -= 1.0;
  if (y < 0.0) y = 0.0;
  return y;
}

Rat rat_of_json(const json& j, bool exact_required) {
  if (j.is_string()) return rat_or_die(j.get<std::string>());
  if (j.is_number_integer()) return Rat(j.get<long>());
  if (j.is_number_float()) {
    if (exact_required)
      fail(Errc::parse_error,
           "exact arithmetic needs rational literals (\"p/q\" strings or integers)");
    // decimal via string round-trip keeps the written value
    return rat_or_die(fmt17(j.get<double>()));
  }
  fail(Errc::parse_error, "expected a number or a rational string");
}

double double_of_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return rat_or_die(j.get<std::string>()).get_d();
  fail(Errc::parse_error, "expected a number");
}

AffineMap map_from_json(const json& j, bool exact) {
  if (!j.is_object()) fail(Errc::parse_error, "each map must be an object");
  if (j.contains("matrix") || j.contains("offset")) {
    const auto& a = j.at("matrix");
    const auto& b = j.at("offset");
    if (!a.is_array() || a.size() != 4 || !b.is_array() || b.size() != 2)
      fail(Errc::parse_error, "matrix form needs 4 matrix and 2 offset entries");
    AffineMap m;
    m.exact = exact;
    for (int i = 0; i < 4; ++i) {
      Rat r = rat_of_json(a[i], exact);
      m.ra[i] = r;
      m.a[i] = r.get_d();
    }
    for (int i = 0; i < 2; ++i) {
      Rat r = rat_of_json(b[i], exact);
      m.rb[i] = r;
      m.b[i] = r.get_d();
    }
    if (!exact) m.ra = {}, m.rb = {};
    return m;
  }
  if (j.contains("center")) {
    const auto& c = j.at("center");
    if (!c.is_array() || c.size() != 2)
      fail(Errc::parse_error, "center must be a 2-element array");
    double rot = j.value("rotation", 0.0);
    if (rot != 0.0) {
      if (exact)
        fail(Errc::parse_error, "rotations need \"arithmetic\": \"float\"");
      return AffineMap::similarity({double_of_json(c[0]), double_of_json(c[1])},
                                   double_of_json(j.at("ratio")), rot);
    }
    if (exact)
      return AffineMap::homothety({rat_of_json(c[0], true), rat_of_json(c[1], true)},
                                  rat_of_json(j.at("ratio"), true));
    return AffineMap::similarity({double_of_json(c[0]), double_of_json(c[1])},
                                 double_of_json(j.at("ratio")), 0.0);
  }
  fail(Errc::parse_error, "map needs matrix/offset or center/ratio fields");
}

HarmonicStructure structure_from_json(const json& j) {
  HarmonicStructure s;
  if (!j.is_object() || !j.contains("base_form") || !j.contains("weights"))
    fail(Errc::parse_error, "structure needs base_form and weights");
  for (const auto& row : j.at("base_form")) {
    std::vector<double> r;
    for (const auto& e : row) r.push_back(double_of_json(e));
    s.base_form.push_back(std::move(r));
  }
  for (const auto& e : j.at("weights")) s.weights.push_back(double_of_json(e));
  return s;
}

json must_parse(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(Errc::parse_error, "malformed JSON");
  return j;
}

}  // namespace

FractalSetup setup_from_name(const std::string& catalog_name) {
  Fractal f = Fractal::catalog(catalog_name);
  HarmonicStructure s = default_structure(f);
  return {std::move(f), std::move(s), ""};
}

FractalSetup setup_from_config(const std::string& config_text) {
  json j = must_parse(config_text);
  if (!j.is_object()) fail(Errc::parse_error, "config must be a JSON object");

  if (j.contains("catalog")) {
    FractalSetup su = setup_from_name(j.at("catalog").get<std::string>());
    if (j.contains("structure")) su.structure = structure_from_json(j.at("structure"));
    su.config_json = j.dump();
    return su;
  }

  FractalSpec spec;
  spec.name = j.value("name", std::string("custom"));
  std::string arith = j.value("arithmetic", std::string("exact"));
  if (arith != "exact" && arith != "float")
    fail(Errc::parse_error, "arithmetic must be \"exact\" or \"float\"");
  spec.exact = arith == "exact";
  if (!j.contains("maps") || !j.at("maps").is_array() || j.at("maps").empty())
    fail(Errc::parse_error, "config needs a non-empty maps array");
  for (const auto& jm : j.at("maps")) spec.maps.push_back(map_from_json(jm, spec.exact));
  spec.contraction_bound = j.value("contraction_bound", 1.0 - 1e-9);
  if (j.contains("boundary_labels"))
    for (const auto& e : j.at("boundary_labels")) spec.boundary_labels.push_back(e.get<int>());
  if (j.contains("boundary_points"))
    for (const auto& e : j.at("boundary_points"))
      spec.boundary_points.push_back(itinerary_or_die(e.get<std::string>()));
  if (spec.boundary_labels.empty() && spec.boundary_points.empty())
    fail(Errc::parse_error, "config needs boundary_labels or boundary_points");

  FractalSetup su{Fractal::make(spec), HarmonicStructure{}, j.dump()};
  if (!j.contains("structure"))
    fail(Errc::parse_error, "custom fractals need an explicit structure block");
  su.structure = structure_from_json(j.at("structure"));
  // fail fast on size mismatches
  build_graph(su.fractal, su.structure, 0);
  return su;
}

std::string serialize_result(const HarmonicMapResult& r, const Fractal& f,
                             const std::string& config_json) {
  const int lc = f.letter_count();
  std::ostringstream os;
  os << "{\n";
  os << "  \"fractal\": \"" << escape(r.fractal) << "\",\n";
  if (!config_json.empty()) os << "  \"config\": " << config_json << ",\n";
  os << "  \"level\": " << r.level << ",\n";
  os << "  \"exact\": " << (r.exact ? "true" : "false") << ",\n";
  os << "  \"basis_level\": " << r.basis_level << ",\n";
  os << "  \"degree\": [";
  for (size_t i = 0; i < r.degree.entries.size(); ++i)
    os << (i ? ", " : "") << r.degree.entries[i];
  os << "],\n";
  os << "  \"deltas\": [";
  for (size_t i = 0; i < r.boundary.deltas.size(); ++i)
    os << (i ? ", " : "") << '"' << rational_to_string(r.boundary.deltas[i]) << '"';
  os << "],\n";
  os << "  \"energy\": " << fmt17(r.energy) << ",\n";
  os << "  \"max_residual\": " << fmt17(r.max_residual) << ",\n";

  os << "  \"cuts\": [";
  for (size_t i = 0; i < r.cuts.size(); ++i) {
    const CutPoint& c = r.cuts[i];
    os << (i ? "," : "") << "\n    {\"vertex\": \"" << to_string(c.vertex.canon, lc)
       << "\", \"minus\": \"" << to_string(c.minus_it, lc) << "\", \"plus\": \""
       << to_string(c.plus_it, lc) << "\", \"shift\": " << c.shift << ", \"cell\": \""
       << word_to_string(c.cell, lc) << "\", \"index\": " << c.index << "}";
  }
  os << (r.cuts.empty() ? "]" : "\n  ]") << ",\n";

  std::vector<VertexId> order;
  order.reserve(r.lift.size());
  for (const auto& [v, val] : r.lift) order.push_back(v);
  std::sort(order.begin(), order.end());

  std::map<std::string, const CutPoint*> plus_after;  // minus id -> cut
  for (const CutPoint& c : r.cuts)
    plus_after[to_string(c.vertex.canon, lc)] = &c;

  os << "  \"vertices\": [";
  bool first = true;
  auto put_row = [&](const std::string& id, const Itinerary& coord_it, double lift,
                     const Rat* lift_ex) {
    Vec2 p = f.vertex_coordinates(coord_it);
    os << (first ? "" : ",") << "\n    {\"id\": \"" << id << "\", \"x\": " << fmt17(p.x)
       << ", \"y\": " << fmt17(p.y) << ", \"lift\": " << fmt17(lift)
       << ", \"circle\": " << fmt17(frac(lift));
    if (lift_ex) os << ", \"lift_exact\": \"" << rational_to_string(*lift_ex) << '"';
    os << "}";
    first = false;
  };
  for (const VertexId& v : order) {
    std::string id = to_string(v.canon, lc);
    double lift = r.lift.at(v);
    const Rat* ex = nullptr;
    auto ei = r.lift_exact.find(v);
    if (r.exact && ei != r.lift_exact.end()) ex = &ei->second;
    put_row(id, v.canon, lift, ex);
    auto pi = plus_after.find(id);
    if (pi != plus_after.end()) {
      const CutPoint& c = *pi->second;
      Rat ex_plus;
      const Rat* exp = nullptr;
      if (ex) {
        ex_plus = *ex + c.shift;
        exp = &ex_plus;
      }
      put_row(to_string(c.plus_it, lc), c.plus_it, lift + static_cast<double>(c.shift),
              exp);
    }
  }
  os << (order.empty() ? "]" : "\n  ]") << "\n";
  os << "}\n";
  return os.str();
}

ResultDocument parse_result(const std::string& json_text) {
  json j = must_parse(json_text);
  ResultDocument d;
  try {
    d.fractal = j.at("fractal").get<std::string>();
    if (j.contains("config")) d.config_json = j.at("config").dump();
    d.level = j.at("level").get<int>();
    d.exact = j.at("exact").get<bool>();
    d.basis_level = j.value("basis_level", -1);
    for (const auto& e : j.at("degree")) d.degree.push_back(e.get<long>());
    for (const auto& e : j.at("deltas")) d.deltas.push_back(e.get<std::string>());
    d.energy = j.at("energy").get<double>();
    d.max_residual = j.at("max_residual").get<double>();
    for (const auto& jc : j.at("cuts")) {
      CutPoint c;
      c.vertex = VertexId{normalize_itinerary(itinerary_or_die(jc.at("vertex").get<std::string>()))};
      c.minus_it = itinerary_or_die(jc.at("minus").get<std::string>());
      c.plus_it = itinerary_or_die(jc.at("plus").get<std::string>());
      c.shift = jc.at("shift").get<long>();
      c.cell = word_from_string(jc.at("cell").get<std::string>());
      c.index = jc.at("index").get<long>();
      d.cuts.push_back(std::move(c));
    }
    for (const auto& jr : j.at("vertices")) {
      ResultRow row;
      row.id = jr.at("id").get<std::string>();
      row.x = jr.at("x").get<double>();
      row.y = jr.at("y").get<double>();
      row.lift = jr.at("lift").get<double>();
      row.circle = jr.at("circle").get<double>();
      row.lift_exact = jr.value("lift_exact", std::string());
      d.rows.push_back(std::move(row));
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(Errc::parse_error, std::string("result document: ") + e.what());
  }
  return d;
}

std::string result_to_csv(const ResultDocument& doc) {
  std::ostringstream os;
  os << "id,x,y,lift,circle\n";
  for (const ResultRow& r : doc.rows)
    os << r.id << ',' << fmt17(r.x) << ',' << fmt17(r.y) << ',' << fmt17(r.lift) << ','
       << fmt17(r.circle) << '\n';
  return os.str();
}

std::string render_svg(const ResultDocument& doc, const SvgOptions& opt) {
  if (doc.rows.empty()) fail(Errc::missing_coordinates, "result has no vertices");
  double minx = doc.rows[0].x, maxx = minx, miny = doc.rows[0].y, maxy = miny;
  for (const ResultRow& r : doc.rows) {
    minx = std::min(minx, r.x);
    maxx = std::max(maxx, r.x);
    miny = std::min(miny, r.y);
    maxy = std::max(maxy, r.y);
  }
  double span = std::max({maxx - minx, maxy - miny, 1e-9});
  double margin = 0.06 * span;
  double scale = opt.size / (span + 2 * margin);
  double legend_h = opt.legend ? 28.0 : 0.0;
  double radius =
      std::max(1.5, 0.35 * opt.size / (1.0 + std::sqrt(static_cast<double>(doc.rows.size()))));

  auto px = [&](double x) { return (x - minx + margin) * scale; };
  auto py = [&](double y) { return (maxy - y + margin) * scale; };  // y up in the plane
  char buf[64];
  auto f2 = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f2(opt.size)
     << "\" height=\"" << f2(opt.size + legend_h) << "\" viewBox=\"0 0 " << f2(opt.size)
     << " " << f2(opt.size + legend_h) << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const ResultRow& r : doc.rows) {
    char hue[32];  // f2 reuses buf, so the hue needs its own storage
    std::snprintf(hue, sizeof hue, "%.4f", r.circle * 360.0);
    os << "<circle cx=\"" << f2(px(r.x)) << "\" cy=\"" << f2(py(r.y)) << "\" r=\""
       << f2(radius) << "\" fill=\"hsl(" << hue << ",100%,50%)\" data-vertex=\""
       << escape(r.id) << "\"/>\n";
  }
  if (opt.legend) {
    os << "<text x=\"8\" y=\"" << f2(opt.size + 19.0)
       << "\" font-family=\"monospace\" font-size=\"13\">degree (";
    for (size_t i = 0; i < doc.degree.size(); ++i) os << (i ? "," : "") << doc.degree[i];
    os << ")  deltas (";
    for (size_t i = 0; i < doc.deltas.size(); ++i)
      os << (i ? "," : "") << escape(doc.deltas[i]);
    os << ")</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

VerifyReport verify_result(const ResultDocument& doc, double tol) {
  VerifyReport rep;
  FractalSetup su =
      doc.config_json.empty() ? setup_from_name(doc.fractal) : setup_from_config(doc.config_json);
  const Fractal& f = su.fractal;
  const int lc = f.letter_count();

  BoundaryData bc;
  for (const std::string& s : doc.deltas) bc.deltas.push_back(rat_or_die(s));
  DegreeVector deg;
  deg.entries = doc.degree;
  bc.rho0 = deg.at(0);

  ApproxGraph g = build_graph(f, su.structure, doc.level);
  CutGraph cg = build_cut_graph(g, doc.cuts, bc);

  // classify rows: canonical (minus) values drive everything; plus rows are
  // checked against their gluing shift
  LiftValues lift;
  std::map<std::string, double> by_id;
  for (const ResultRow& r : doc.rows) {
    if (!by_id.emplace(r.id, r.lift).second)
      fail(Errc::parse_error, "duplicate vertex row '" + r.id + "'");
    Itinerary it = itinerary_or_die(r.id);
    VertexId v = f.canonical_vertex(it);
    if (to_string(v.canon, lc) == r.id) lift[v] = r.lift;
  }
  for (const VertexId& v : g.vertices)
    if (!lift.count(v))
      fail(Errc::missing_value, "result has no row for vertex " + to_string(v.canon, lc));

  double glue_err = 0;
  for (const CutPoint& c : doc.cuts) {
    auto it = by_id.find(to_string(c.plus_it, lc));
    if (it == by_id.end())
      fail(Errc::missing_value, "result has no plus-sheet row for cut " +
                                    to_string(c.vertex.canon, lc));
    double expect = lift.at(c.vertex) + static_cast<double>(c.shift);
    glue_err = std::max(glue_err, std::abs(it->second - expect));
  }

  std::vector<double> split = split_values(cg, lift);
  auto res_map = laplacian_residual(cg, split);
  rep.residual = glue_err;
  for (const auto& [v, r] : res_map) rep.residual = std::max(rep.residual, std::abs(r));
  rep.residual_ok = rep.residual <= tol;

  rep.energy = graph_energy(cg, split);
  rep.energy_delta = std::abs(rep.energy - doc.energy);
  rep.energy_ok = rep.energy_delta <= tol * std::max(1.0, std::abs(doc.energy));

  std::string degree_note;
  try {
    std::vector<Cycle> cycles;
    if (doc.basis_level < 0) {
      cycles = cell_loops(f, deg.order(), doc.level).loops;
    } else {
      std::vector<ApproxGraph> chain;
      for (int k = doc.basis_level; k <= doc.level; ++k)
        chain.push_back(build_graph(f, su.structure, k));
      CycleBasis basis = spanning_tree_basis(chain[0]);
      PcfCuts pc = pcf_cut_points(f, chain[0], chain[1], basis, deg);
      cycles = std::move(pc.cycles);
      for (size_t k = 1; k + 1 < chain.size(); ++k)
        for (Cycle& c : cycles) c = embed_cycle(chain[k], chain[k + 1], c);
    }
    DegreeVector got = degree_vector(lift, cycles);
    rep.recovered = got.entries;
    rep.degree_ok = same_degree(got, deg);
  } catch (const Error& e) {
    rep.degree_ok = false;
    degree_note = std::string(" (") + e.what() + ")";
  }

  std::ostringstream l1, l2, l3;
  l1 << (rep.residual_ok ? "pass" : "FAIL") << "  harmonicity: max residual "
     << fmt17(rep.residual) << " (tol " << fmt17(tol) << ")";
  l2 << (rep.energy_ok ? "pass" : "FAIL") << "  energy: recomputed " << fmt17(rep.energy)
     << " vs stored " << fmt17(doc.energy);
  l3 << (rep.degree_ok ? "pass" : "FAIL") << "  degree: recovered (";
  for (size_t i = 0; i < rep.recovered.size(); ++i) l3 << (i ? "," : "") << rep.recovered[i];
  l3 << ") vs prescribed (";
  for (size_t i = 0; i < doc.degree.size(); ++i) l3 << (i ? "," : "") << doc.degree[i];
  l3 << ")" << degree_note;
  rep.lines = {l1.str(), l2.str(), l3.str()};
  return rep;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot open '" + path + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io_error, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) fail(Errc::io_error, "short write to '" + path + "'");
}

}  // namespace fhm
