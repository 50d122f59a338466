#include "fairgen/generator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "fairgen/text_io.hpp"

namespace fairgen {

std::string to_string(GenForm form) {
  return form == GenForm::Lambda ? "lambda" : "diag";
}

std::string to_string(Structure structure) {
  switch (structure) {
    case Structure::Hierarchical: return "hierarchical";
    case Structure::Alternate: return "alternate";
    case Structure::Abstract: return "abstract";
  }
  return "?";
}

GenForm parse_gen_form(const std::string& s) {
  if (s == "lambda")
    return GenForm::Lambda;
  if (s == "diag")
    return GenForm::Diag;
  throw std::invalid_argument("unknown generator form '" + s +
                              "' (expected lambda or diag)");
}

Structure parse_structure(const std::string& s) {
  if (s == "hierarchical")
    return Structure::Hierarchical;
  if (s == "alternate")
    return Structure::Alternate;
  if (s == "abstract")
    return Structure::Abstract;
  throw std::invalid_argument("unknown structure '" + s +
                              "' (expected hierarchical, alternate or abstract)");
}

int num_sources(const AxisSchema& schema, Structure structure) {
  const int p = schema.num_axes();
  switch (structure) {
    case Structure::Hierarchical:
    case Structure::Alternate:
      return p;
    case Structure::Abstract:
      return p >= 3 ? p * (p - 1) / 2 : p;
  }
  return p;
}

std::vector<std::vector<std::int64_t>> source_cells(const Dataset& ds,
                                                    const GroupId& g, int label,
                                                    Structure structure) {
  const AxisSchema& schema = ds.schema();
  std::vector<std::vector<std::int64_t>> cells;
  switch (structure) {
    case Structure::Hierarchical:
      for (const ParentGroupId& parent : parent_groups(schema, g))
        cells.push_back(ds.members(parent, label));
      break;
    case Structure::Alternate: {
      GroupId adv = adversarial_group(schema, g);
      for (const ParentGroupId& parent : parent_groups(schema, adv))
        cells.push_back(ds.members(parent, label));
      break;
    }
    case Structure::Abstract:
      for (const GroupPredicate& pred : grandparent_groups(schema, g))
        cells.push_back(ds.members(pred, label));
      break;
  }
  return cells;
}

RowMatrix gather_features(const Dataset& ds, const std::vector<std::int64_t>& positions) {
  RowMatrix out(positions.size(), ds.feature_dim());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const Record& r = ds.record(static_cast<std::size_t>(positions[i]));
    double* row = out.row(i);
    for (int t = 0; t < ds.feature_dim(); ++t)
      row[t] = static_cast<double>(r.features[t]);
  }
  return out;
}

namespace {

void check_batches(const std::vector<RowMatrix>& batches) {
  if (batches.empty())
    throw std::invalid_argument("need at least one source batch");
  for (const RowMatrix& b : batches)
    if (b.rows != batches[0].rows || b.cols != batches[0].cols)
      throw std::invalid_argument("source batches must have identical shapes");
}

}  // namespace

RowMatrix generate_simple(const std::vector<double>& lambda,
                          const std::vector<RowMatrix>& source_batches) {
  check_batches(source_batches);
  if (lambda.size() != source_batches.size())
    throw std::invalid_argument("lambda has " + std::to_string(lambda.size()) +
                                " weights for " + std::to_string(source_batches.size()) +
                                " source batches");
  RowMatrix out(source_batches[0].rows, source_batches[0].cols);
  for (std::size_t i = 0; i < source_batches.size(); ++i) {
    const double w = lambda[i];
    const RowMatrix& b = source_batches[i];
    for (std::size_t t = 0; t < out.data.size(); ++t)
      out.data[t] += w * b.data[t];
  }
  return out;
}

RowMatrix generate_diag(const std::vector<double>& diag,
                        const std::vector<RowMatrix>& source_batches) {
  check_batches(source_batches);
  if (diag.size() != source_batches[0].cols)
    throw std::invalid_argument("diag has " + std::to_string(diag.size()) +
                                " weights for feature dimension " +
                                std::to_string(source_batches[0].cols));
  RowMatrix out(source_batches[0].rows, source_batches[0].cols);
  for (const RowMatrix& b : source_batches)
    for (std::size_t t = 0; t < out.data.size(); ++t)
      out.data[t] += b.data[t];
  for (std::size_t j = 0; j < out.rows; ++j) {
    double* row = out.row(j);
    for (std::size_t t = 0; t < out.cols; ++t)
      row[t] *= diag[t];
  }
  return out;
}

RowMatrix generate(const GeneratorParams& params,
                   const std::vector<RowMatrix>& source_batches) {
  return params.form == GenForm::Lambda ? generate_simple(params.weights, source_batches)
                                        : generate_diag(params.weights, source_batches);
}

double gen_loss(const RowMatrix& s_gen, const RowMatrix& s_target,
                const std::vector<RowMatrix>& source_batches, const MmdConfig& cfg) {
  double loss = mmd2(s_gen, s_target, cfg);
  for (const RowMatrix& src : source_batches)
    loss += mmd2(s_gen, src, cfg);
  return loss;
}

double gen_loss_value(const GeneratorParams& params, const RowMatrix& s_target,
                      const std::vector<RowMatrix>& source_batches,
                      const MmdConfig& cfg) {
  RowMatrix s_gen = generate(params, source_batches);
  return gen_loss(s_gen, s_target, source_batches, cfg);
}

std::vector<double> gen_loss_param_grad(const GeneratorParams& params,
                                        const RowMatrix& s_target,
                                        const std::vector<RowMatrix>& source_batches,
                                        const MmdConfig& cfg) {
  RowMatrix s_gen = generate(params, source_batches);

  // d loss / d z_j accumulated over the target term and every source term.
  RowMatrix dz = mmd2_grad(s_gen, s_target, cfg);
  for (const RowMatrix& src : source_batches) {
    RowMatrix g = mmd2_grad(s_gen, src, cfg);
    for (std::size_t t = 0; t < dz.data.size(); ++t)
      dz.data[t] += g.data[t];
  }

  std::vector<double> grad(params.weights.size(), 0.0);
  if (params.form == GenForm::Lambda) {
    for (std::size_t i = 0; i < source_batches.size(); ++i) {
      double acc = 0.0;
      const RowMatrix& b = source_batches[i];
      for (std::size_t t = 0; t < dz.data.size(); ++t)
        acc += dz.data[t] * b.data[t];
      grad[i] = acc;
    }
  } else {
    for (std::size_t j = 0; j < dz.rows; ++j) {
      const double* dzr = dz.row(j);
      for (std::size_t t = 0; t < dz.cols; ++t) {
        double sum = 0.0;
        for (const RowMatrix& b : source_batches)
          sum += b.row(j)[t];
        grad[t] += dzr[t] * sum;
      }
    }
  }
  return grad;
}

TrainResult train_generators(const Dataset& ds, const GenTrainConfig& cfg,
                             const std::vector<GenForm>& forms) {
  if (cfg.iterations < 1)
    throw std::invalid_argument("iterations must be >= 1");
  if (cfg.batch < 2)
    throw std::invalid_argument("batch must be >= 2 (MMD needs m >= 2)");
  if (!(cfg.learning_rate > 0.0))
    throw std::invalid_argument("learning_rate must be positive");
  if (static_cast<int>(forms.size()) != ds.num_labels())
    throw std::invalid_argument("need one generator form per label");

  const AxisSchema& schema = ds.schema();
  const int num_groups = schema.num_groups();
  const int num_labels = ds.num_labels();
  const int p_src = num_sources(schema, cfg.structure);

  // Eligibility: the sampled group feeds one update per label, so its target
  // and source cells must be nonempty for every label.
  std::vector<std::vector<std::vector<std::int64_t>>> sources_by_code(
      static_cast<std::size_t>(num_groups) * num_labels);
  std::vector<int> eligible;
  for (int code = 0; code < num_groups; ++code) {
    GroupId g = schema.group_from_code(code);
    bool all_labels_ok = true;
    for (int k = 0; k < num_labels; ++k) {
      bool ok = !ds.cell_by_code(code, k).empty();
      auto cells = source_cells(ds, g, k, cfg.structure);
      for (const auto& c : cells)
        ok = ok && !c.empty();
      if (ok)
        sources_by_code[static_cast<std::size_t>(code) * num_labels + k] =
            std::move(cells);
      all_labels_ok = all_labels_ok && ok;
    }
    if (all_labels_ok)
      eligible.push_back(code);
  }
  for (int k = 0; k < num_labels; ++k) {
    bool any = false;
    for (int code = 0; code < num_groups && !any; ++code)
      any = !sources_by_code[static_cast<std::size_t>(code) * num_labels + k].empty();
    if (!any)
      throw std::invalid_argument("no eligible group for label " + std::to_string(k) +
                                  ": every group has an empty target or source cell");
  }
  if (eligible.empty())
    throw std::invalid_argument(
        "no group has nonempty target and source cells for every label");

  TrainResult result;
  result.suite.structure = cfg.structure;
  result.suite.schema_hash = schema.content_hash();
  result.loss_trace.assign(num_labels, {});

  std::vector<AdamState> adam;
  AdamConfig adam_cfg;
  adam_cfg.step = cfg.learning_rate;
  for (int k = 0; k < num_labels; ++k) {
    GeneratorParams params;
    params.label = k;
    params.form = forms[k];
    const std::size_t n =
        forms[k] == GenForm::Lambda ? static_cast<std::size_t>(p_src)
                                    : static_cast<std::size_t>(ds.feature_dim());
    params.weights.assign(n, 1.0 / static_cast<double>(p_src));
    result.suite.per_label.push_back(std::move(params));
    adam.emplace_back(n, adam_cfg);
  }

  Rng rng(cfg.seed);
  const std::size_t b = static_cast<std::size_t>(cfg.batch);
  for (int iter = 0; iter < cfg.iterations; ++iter) {
    const int code = eligible[rng.uniform_index(eligible.size())];
    for (int k = 0; k < num_labels; ++k) {
      const auto& target_cell = ds.cell_by_code(code, k);
      const auto& src = sources_by_code[static_cast<std::size_t>(code) * num_labels + k];

      RowMatrix target = gather_features(ds, sample_with_replacement(target_cell, b, rng));
      std::vector<RowMatrix> source_batches;
      source_batches.reserve(src.size());
      for (const auto& cell : src)
        source_batches.push_back(gather_features(ds, sample_with_replacement(cell, b, rng)));

      MmdConfig mmd_cfg = cfg.mmd;
      if (cfg.median_bandwidth) {
        std::vector<const RowMatrix*> real{&target};
        for (const RowMatrix& s : source_batches)
          real.push_back(&s);
        mmd_cfg.sigma = median_heuristic_sigma(real);
      }

      GeneratorParams& params = result.suite.per_label[k];
      double loss = gen_loss_value(params, target, source_batches, mmd_cfg);
      if (!std::isfinite(loss))
        throw std::runtime_error("non-finite generator loss at iteration " +
                                 std::to_string(iter) + ", label " + std::to_string(k));
      std::vector<double> grad =
          gen_loss_param_grad(params, target, source_batches, mmd_cfg);
      adam[k].update(params.weights, grad);
      result.loss_trace[k].push_back(loss);
    }
  }
  return result;
}

AugmentResult augment(const Dataset& ds, const GeneratorSuite& suite,
                      int n_per_cell, Rng& rng) {
  if (n_per_cell < 1)
    throw std::invalid_argument("n_per_cell must be >= 1");
  if (suite.schema_hash != ds.schema().content_hash())
    throw std::invalid_argument("generator suite was trained under a different schema");
  if (static_cast<int>(suite.per_label.size()) != ds.num_labels())
    throw std::invalid_argument("generator suite does not cover every label");

  std::vector<Record> records = ds.records();
  AugmentResult result{Dataset(ds.schema(), ds.feature_dim(), ds.num_labels(), {}), 0, {}};

  for (int code = 0; code < ds.schema().num_groups(); ++code) {
    GroupId g = ds.schema().group_from_code(code);
    for (int k = 0; k < ds.num_labels(); ++k) {
      const auto& cell = ds.cell_by_code(code, k);
      if (cell.empty())
        continue;  // absent intersections are not synthesized
      if (cell.size() >= static_cast<std::size_t>(n_per_cell))
        continue;
      const std::size_t need = static_cast<std::size_t>(n_per_cell) - cell.size();

      auto sources = source_cells(ds, g, k, suite.structure);
      bool missing = false;
      for (std::size_t i = 0; i < sources.size(); ++i)
        if (sources[i].empty()) {
          result.warnings.push_back("group " + format_group(g) + " label " +
                                    std::to_string(k) + ": source cell " +
                                    std::to_string(i) + " is empty; cell not augmented");
          missing = true;
        }
      if (missing)
        continue;

      std::vector<RowMatrix> source_batches;
      source_batches.reserve(sources.size());
      for (const auto& s : sources)
        source_batches.push_back(gather_features(ds, sample_with_replacement(s, need, rng)));
      RowMatrix generated = generate(suite.per_label[k], source_batches);

      for (std::size_t j = 0; j < generated.rows; ++j) {
        Record r;
        r.label = k;
        r.group = g;
        r.features.resize(ds.feature_dim());
        const double* row = generated.row(j);
        for (int t = 0; t < ds.feature_dim(); ++t)
          r.features[t] = static_cast<float>(row[t]);
        records.push_back(std::move(r));
        ++result.generated;
      }
    }
  }
  result.data = Dataset(ds.schema(), ds.feature_dim(), ds.num_labels(), std::move(records));
  return result;
}

void save_suite(const GeneratorSuite& suite, const std::filesystem::path& path) {
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(suite.schema_hash));
  std::string body = "schema_hash " + std::string(hash) + "\n";
  body += "structure " + to_string(suite.structure) + "\n";
  body += "forms ";
  for (std::size_t k = 0; k < suite.per_label.size(); ++k) {
    if (k)
      body += ',';
    body += to_string(suite.per_label[k].form);
  }
  body += "\n";
  for (const GeneratorParams& p : suite.per_label) {
    body += std::to_string(p.label) + " " + to_string(p.form) + " ";
    for (std::size_t i = 0; i < p.weights.size(); ++i) {
      if (i)
        body += ',';
      body += format_g9(p.weights[i]);
    }
    body += "\n";
  }
  write_text_file(path, body);
}

GeneratorSuite load_suite(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open " + path.string());
  GeneratorSuite suite;
  std::string line;

  auto next_line = [&](const char* what) {
    while (std::getline(in, line)) {
      if (!trim(line).empty())
        return std::string(trim(line));
    }
    throw std::runtime_error(path.string() + ": missing " + std::string(what));
  };

  std::string hash_line = next_line("schema_hash");
  if (hash_line.rfind("schema_hash ", 0) != 0)
    throw std::runtime_error(path.string() + ": expected schema_hash header");
  suite.schema_hash = std::stoull(hash_line.substr(12), nullptr, 16);

  std::string structure_line = next_line("structure");
  if (structure_line.rfind("structure ", 0) != 0)
    throw std::runtime_error(path.string() + ": expected structure header");
  suite.structure = parse_structure(structure_line.substr(10));

  std::string forms_line = next_line("forms");
  if (forms_line.rfind("forms ", 0) != 0)
    throw std::runtime_error(path.string() + ": expected forms header");

  while (std::getline(in, line)) {
    std::string_view sv = trim(line);
    if (sv.empty())
      continue;
    std::vector<std::string> fields = split(sv, ' ');
    if (fields.size() != 3)
      throw std::runtime_error(path.string() + ": expected 'label form params' line");
    GeneratorParams p;
    p.label = static_cast<int>(parse_int(fields[0], "label"));
    p.form = parse_gen_form(fields[1]);
    for (const std::string& tok : split(fields[2], ','))
      p.weights.push_back(parse_double(tok, "generator weight"));
    if (p.label != static_cast<int>(suite.per_label.size()))
      throw std::runtime_error(path.string() + ": labels must appear in order");
    suite.per_label.push_back(std::move(p));
  }
  if (suite.per_label.empty())
    throw std::runtime_error(path.string() + ": no generator parameters");
  return suite;
}

}  // namespace fairgen
