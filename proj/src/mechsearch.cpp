//
// Project beflow - Copyright 2026 The beflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "beflow/mechsearch.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "beflow/smiles.h"

namespace beflow {

VectorField NetworkField::field(const BEMatrix &reactant) const {
  AtomFeatures features = atom_features(reactant, table_);
  const VectorFieldModel *model = &model_;
  return [model, features](double t, const Eigen::MatrixXd &x) {
    return model->forward(x, features, t);
  };
}

std::uint64_t state_hash(const BEMatrix &be) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::int64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= static_cast<std::uint64_t>(v >> (8 * b)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  mix(be.size());
  for (const BEAtom &a: be.atoms) {
    mix(a.atomic_number);
    mix(a.atom_map);
  }
  for (int i = 0; i < be.size(); ++i)
    for (int j = 0; j < be.size(); ++j)
      mix(be.entries(i, j));
  return h;
}

std::string state_smiles(const BEMatrix &be, const PeriodicTable &table) {
  Reconstruction r = reconstruct(be, table);
  if (!r.ok())
    return "";
  return canonical_smiles(r.graph, false, table);
}

namespace {

struct SampleResult {
  FailureMode failure = FailureMode::kNone;
  std::string product;
  BEMatrix be;
};

}  // namespace

StepSampling sample_step(const FieldModel &model, const BEMatrix &reactant,
                         int samples, const SampleConfig &config,
                         const PeriodicTable &table) {
  if (samples < 1)
    throw std::invalid_argument("sample count must be positive");
  const int n = reactant.size();
  const Eigen::MatrixXd base = reactant.active().cast<double>();
  const std::uint64_t key = state_hash(reactant);
  const VectorField field = model.field(reactant);

  std::vector<SampleResult> results(samples);
  auto run_one = [&](int k) {
    Rng rng(stream_key(config.seed, key, static_cast<std::uint64_t>(k)));
    Eigen::MatrixXd x0 = base + sample_noise(n, config.sigma, rng);
    Eigen::MatrixXd x = euler_integrate(field, x0, config.euler_steps);
    SampleResult &out = results[k];
    try {
      DecodedState d = decode_state(reactant, x, config.rounding,
                                    config.validity_fix, table);
      out.failure = d.failure;
      out.be = std::move(d.product);
      if (d.valid())
        out.product = canonical_smiles(d.reconstruction.graph, false, table);
    } catch (const InfeasibleTarget &) {
      out.failure = FailureMode::kChemInvalid;
    }
  };

  const int threads = std::max(1, std::min(config.threads, samples));
  if (threads == 1) {
    for (int k = 0; k < samples; ++k)
      run_one(k);
  } else {
    std::atomic<int> next { 0 };
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&] {
        for (int k; (k = next.fetch_add(1)) < samples;) {
          try {
            run_one(k);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error)
              error = std::current_exception();
          }
        }
      });
    for (auto &t: pool)
      t.join();
    if (error)
      std::rethrow_exception(error);
  }

  StepSampling out;
  out.samples = samples;
  std::map<std::string, int> index;
  for (SampleResult &r: results) {
    out.matrices.push_back(r.be);
    if (r.failure != FailureMode::kNone) {
      ++out.invalid;
      ++out.failures[r.failure];
      continue;
    }
    auto [it, fresh] = index.emplace(r.product,
                                     static_cast<int>(out.outcomes.size()));
    if (fresh)
      out.outcomes.push_back({ r.product, std::move(r.be), 0 });
    ++out.outcomes[it->second].frequency;
  }
  std::stable_sort(out.outcomes.begin(), out.outcomes.end(),
                   [](const StepOutcome &a, const StepOutcome &b) {
                     if (a.frequency != b.frequency)
                       return a.frequency > b.frequency;
                     return a.product < b.product;
                   });
  return out;
}

std::vector<std::string> Pathway::products() const {
  std::vector<std::string> out;
  for (const PathwayStep &s: steps)
    out.push_back(s.product);
  return out;
}

namespace {

Pathway make_root(const BEMatrix &reactants, const PeriodicTable &table) {
  Pathway p;
  p.root_state = reactants;
  p.root = state_smiles(reactants, table);
  if (p.root.empty())
    throw std::invalid_argument("reactant matrix does not reconstruct");
  return p;
}

Pathway extend(const Pathway &p, const StepOutcome &o, int samples) {
  Pathway child = p;
  child.steps.push_back({ p.last_smiles(), o.product, o.be, o.frequency,
                          samples });
  child.score += std::log(static_cast<double>(o.frequency) / samples);
  child.terminal = o.product == p.last_smiles();
  return child;
}

bool better(const Pathway &a, const Pathway &b) {
  if (a.score != b.score)
    return a.score > b.score;
  return a.products() < b.products();
}

}  // namespace

Pathway rollout(const StepSampler &sampler, const BEMatrix &reactants,
                int samples, int max_depth, const PeriodicTable &table) {
  if (max_depth < 1)
    throw std::invalid_argument("max_depth must be at least 1");
  Pathway p = make_root(reactants, table);
  for (int depth = 0; depth < max_depth; ++depth) {
    StepSampling s = sampler.sample(p.last_state(), samples);
    if (s.outcomes.empty())
      return p;
    p = extend(p, s.outcomes.front(), samples);
    if (p.terminal)
      return p;
  }
  p.depth_exhausted = true;
  return p;
}

std::vector<Pathway> beam_search(const StepSampler &sampler,
                                 const BEMatrix &reactants, int width,
                                 int depth, int samples,
                                 const PeriodicTable &table) {
  if (width < 1 || depth < 1)
    throw std::invalid_argument("beam width and depth must be at least 1");
  std::vector<Pathway> live { make_root(reactants, table) };
  std::vector<Pathway> done;
  for (int level = 0; level < depth && !live.empty(); ++level) {
    std::vector<Pathway> children;
    for (const Pathway &p: live) {
      StepSampling s = sampler.sample(p.last_state(), samples);
      const int take = std::min<int>(width, static_cast<int>(s.outcomes.size()));
      for (int k = 0; k < take; ++k)
        children.push_back(extend(p, s.outcomes[k], samples));
    }
    std::stable_sort(children.begin(), children.end(), better);
    if (static_cast<int>(children.size()) > width)
      children.resize(width);
    live.clear();
    for (Pathway &c: children) {
      if (c.terminal)
        done.push_back(std::move(c));
      else
        live.push_back(std::move(c));
    }
  }
  for (Pathway &p: live) {
    p.depth_exhausted = true;
    done.push_back(std::move(p));
  }
  std::stable_sort(done.begin(), done.end(), better);
  return done;
}

void write_pathways(std::ostream &out, const std::vector<Pathway> &pathways) {
  for (std::size_t r = 0; r < pathways.size(); ++r) {
    const Pathway &p = pathways[r];
    out << "pathway " << r + 1 << " score=" << p.score
        << " terminal=" << (p.terminal ? 1 : 0) << '\n';
    for (const PathwayStep &s: p.steps)
      out << s.reactants << ">>" << s.product << " (" << s.frequency << '/'
          << s.samples << ")\n";
  }
}

}  // namespace beflow
