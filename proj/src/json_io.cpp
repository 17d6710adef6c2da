#include "orbring/json_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace orbring {

namespace {

ordered_json poly_json(const Poly& p) {
  ordered_json a = ordered_json::array();
  for (std::int64_t c : p) a.push_back(c);
  return a;
}

Poly poly_from_json(const ordered_json& a) {
  if (!a.is_array()) throw input_error("expected a coefficient array");
  Poly p;
  for (const auto& c : a) {
    if (!c.is_number_integer()) throw input_error("non-integer coefficient");
    p.push_back(c.get<std::int64_t>());
  }
  return p;
}

}  // namespace

ordered_json ring_document(const OrbifoldRing& ring, std::uint64_t seed,
                           bool with_structure_constants,
                           const std::vector<CheckResult>& checks) {
  const CaseConfig& cfg = ring.config();
  ordered_json doc;
  doc["schema"] = 1;
  doc["engine"] = "orbring 1.0.0";
  doc["case"] = cfg.case_name();
  doc["n"] = cfg.n;
  doc["group_degree"] = cfg.group_degree();
  doc["discrete_torsion"] = ring.discrete_torsion();
  doc["seed"] = seed;
  doc["base_betti"] = poly_json(
      Poly(cfg.base_betti.begin(), cfg.base_betti.end()));
  doc["group_order"] = ring.group_order();
  doc["basis_size"] = ring.basis_size();

  ordered_json sectors = ordered_json::array();
  for (int gi = 0; gi < ring.group_order(); ++gi) {
    const SectorGeometry& s = ring.sector(gi);
    ordered_json js;
    js["g"] = print_cycles(ring.group_element(gi));
    js["partition"] = s.part.str();
    js["age"] = s.age;
    js["component_count"] = s.comp_count;
    js["betti"] = poly_json(s.betti());  // unshifted; total deg adds 2*age
    sectors.push_back(std::move(js));
  }
  doc["sectors"] = std::move(sectors);

  doc["poincare_total"] = poly_json(ring.poincare_total());
  doc["poincare_invariants"] = poly_json(ring.poincare_invariant());

  if (with_structure_constants) {
    const auto& sc = ring.structure_constants();
    const std::int64_t b = ring.basis_size();
    ordered_json table = ordered_json::array();
    for (std::int64_t a = 0; a < b; ++a) {
      const BasisKey ka = ring.key_of_flat(a);
      const std::int64_t a_local = a - ring.sector_flat_offset(ka.g);
      for (std::int64_t c = 0; c < b; ++c) {
        const auto& terms = sc[std::size_t(a * b + c)];
        if (terms.empty()) continue;
        const BasisKey kc = ring.key_of_flat(c);
        const std::int64_t c_local = c - ring.sector_flat_offset(kc.g);
        for (const auto& [flat, coeff] : terms) {
          ordered_json row;
          row["g"] = ka.g;
          row["h"] = kc.g;
          row["i"] = a_local;
          row["j"] = c_local;
          row["target_basis"] = flat;
          row["coeff"] = coeff.get_str();
          table.push_back(std::move(row));
        }
      }
    }
    doc["structure_constants"] = std::move(table);
  }

  ordered_json jchecks = ordered_json::array();
  for (const CheckResult& r : checks) {
    ordered_json jc;
    jc["name"] = r.name;
    jc["status"] = r.pass ? "pass" : "fail";
    jc["details"] = r.details;
    jchecks.push_back(std::move(jc));
  }
  doc["checks"] = std::move(jchecks);
  return doc;
}

std::string document_text(const ordered_json& doc) {
  return doc.dump(2) + "\n";
}

void write_document(const ordered_json& doc, const std::string& path) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw input_error("cannot open " + tmp.string() + " for write");
    out << document_text(doc);
    if (!out.flush())
      throw input_error("short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw input_error("cannot rename into " + path + ": " + ec.message());
  }
}

ordered_json load_document(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open " + path);
  ordered_json doc = ordered_json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw input_error("malformed JSON in " + path);
  return doc;
}

RunConfig read_run_config(const ordered_json& doc) {
  if (!doc.is_object() || !doc.contains("schema") ||
      !doc["schema"].is_number_integer() || doc["schema"].get<int>() != 1)
    throw input_error("unsupported document schema");
  RunConfig rc;
  if (!doc.contains("case") || !doc["case"].is_string())
    throw input_error("missing case");
  const std::string cs = doc["case"].get<std::string>();
  if (cs == "hilb")
    rc.cfg.kind = CaseKind::HilbA;
  else if (cs == "kummer")
    rc.cfg.kind = CaseKind::KummerB;
  else
    throw input_error("unknown case \"" + cs + "\"");
  if (!doc.contains("n") || !doc["n"].is_number_integer())
    throw input_error("missing n");
  rc.cfg.n = doc["n"].get<int>();
  if (!doc.contains("discrete_torsion") || !doc["discrete_torsion"].is_boolean())
    throw input_error("missing discrete_torsion");
  rc.discrete_torsion = doc["discrete_torsion"].get<bool>();
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer())
      throw input_error("malformed seed");
    rc.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("base_betti")) {
    Poly b = poly_from_json(doc["base_betti"]);
    if (b.size() != 5) throw input_error("base_betti must have 5 entries");
    for (int i = 0; i < 5; ++i) rc.cfg.base_betti[std::size_t(i)] = b[std::size_t(i)];
  }
  rc.cfg.validate();
  return rc;
}

}  // namespace orbring
