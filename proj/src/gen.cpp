/*
 * Copyright 2026 The colstore Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include "colstore/gen.hpp"

#include <array>
#include <cmath>
#include <random>

#include "colstore/writer.hpp"

namespace colstore {

namespace {

// Distributions are written out by hand: the standard library's are not
// required to produce the same sequence across implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : engine_() % n; }
  double exponential(double mean) { return -mean * std::log1p(-uniform()); }
  double gaussian(double mean, double sigma) {
    const auto u1 = 1.0 - uniform();
    const auto u2 = uniform();
    return mean + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }
  bool chance(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

enum class Dist { kConstant, kLowCardinality, kQuantized, kExponential, kGaussian, kUniform, kSign };

enum class Leaf { kBool, kInt32, kUInt32, kUInt64, kFloat32, kFloat64 };

struct FieldPlan {
  std::string name;
  Leaf leaf;
  Dist dist;
  double scale;
  int group = -1;  // collection group, -1 for scalars
  bool counter = false;
};

struct Group {
  std::string name;
  double mean_size;
  std::uint64_t max_size;
};

struct Plan {
  std::vector<Group> groups;
  std::vector<FieldPlan> fields;
  std::vector<std::string> read;
};

FieldSpec leaf_spec(const std::string& name, Leaf leaf) {
  switch (leaf) {
    case Leaf::kBool: return FieldSpec::of<bool>(name);
    case Leaf::kInt32: return FieldSpec::of<std::int32_t>(name);
    case Leaf::kUInt32: return FieldSpec::of<std::uint32_t>(name);
    case Leaf::kUInt64: return FieldSpec::of<std::uint64_t>(name);
    case Leaf::kFloat32: return FieldSpec::of<float>(name);
    case Leaf::kFloat64: return FieldSpec::of<double>(name);
  }
  return FieldSpec::of<bool>(name);
}

Dist float_dist(std::size_t i) {
  static constexpr std::array<Dist, 6> kCycle = {Dist::kExponential, Dist::kGaussian,      Dist::kQuantized,
                                                 Dist::kUniform,     Dist::kLowCardinality, Dist::kConstant};
  return kCycle[i % kCycle.size()];
}

Dist int_dist(std::size_t i) {
  static constexpr std::array<Dist, 3> kCycle = {Dist::kLowCardinality, Dist::kConstant, Dist::kUniform};
  return kCycle[i % kCycle.size()];
}

void add_group(Plan& plan, std::string name, double mean, std::uint64_t max,
               const std::vector<std::pair<std::string, Leaf>>& members) {
  const int g = static_cast<int>(plan.groups.size());
  plan.groups.push_back({name, mean, max});
  plan.fields.push_back({"n" + name, Leaf::kUInt32, Dist::kConstant, 0, g, true});
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto& [member, leaf] = members[i];
    const bool charge = member == "charge";
    const auto dist = charge ? Dist::kSign : leaf == Leaf::kFloat32 ? float_dist(i) : int_dist(i);
    plan.fields.push_back({name + "_" + member, leaf, dist, charge ? 1.0 : 10.0 + static_cast<double>(i), g, false});
  }
}

Plan lhcb_plan() {
  Plan p;
  p.fields.push_back({"B_FlightDistance", Leaf::kFloat64, Dist::kExponential, 12.0});
  p.fields.push_back({"B_VertexChi2", Leaf::kFloat64, Dist::kExponential, 4.0});
  for (int h = 1; h <= 3; ++h) {
    const auto pre = "H" + std::to_string(h) + "_";
    p.fields.push_back({pre + "PX", Leaf::kFloat64, Dist::kGaussian, 4000.0});
    p.fields.push_back({pre + "PY", Leaf::kFloat64, Dist::kGaussian, 4000.0});
    p.fields.push_back({pre + "PZ", Leaf::kFloat64, Dist::kExponential, 40000.0});
    p.fields.push_back({pre + "ProbK", Leaf::kFloat64, Dist::kUniform, 1.0});
    p.fields.push_back({pre + "ProbPi", Leaf::kFloat64, Dist::kUniform, 1.0});
    p.fields.push_back({pre + "Charge", Leaf::kInt32, Dist::kSign, 1.0});
    p.fields.push_back({pre + "IPChi2", Leaf::kFloat64, Dist::kExponential, 50.0});
    p.fields.push_back({pre + "isMuon", Leaf::kInt32, Dist::kConstant, 1.0});
    for (const auto* v : {"PX", "PY", "PZ", "ProbK", "ProbPi", "isMuon"}) p.read.push_back(pre + v);
  }
  return p;
}

Plan h1_plan() {
  Plan p;
  add_group(p, "Track", 12, 64,
            {{"px", Leaf::kFloat32}, {"py", Leaf::kFloat32}, {"pz", Leaf::kFloat32}, {"charge", Leaf::kInt32},
             {"nhits", Leaf::kInt32}, {"dedx", Leaf::kFloat32}, {"dca", Leaf::kFloat32}, {"z0", Leaf::kFloat32},
             {"chi2", Leaf::kFloat32}, {"ndf", Leaf::kInt32}, {"theta", Leaf::kFloat32}, {"phi", Leaf::kFloat32}});
  add_group(p, "Jet", 3, 16,
            {{"pt", Leaf::kFloat32}, {"eta", Leaf::kFloat32}, {"phi", Leaf::kFloat32}, {"e", Leaf::kFloat32},
             {"ntracks", Leaf::kInt32}, {"emfrac", Leaf::kFloat32}, {"flag", Leaf::kInt32}, {"m", Leaf::kFloat32}});
  add_group(p, "Cluster", 6, 32,
            {{"e", Leaf::kFloat32}, {"x", Leaf::kFloat32}, {"y", Leaf::kFloat32}, {"z", Leaf::kFloat32},
             {"ncells", Leaf::kInt32}, {"type", Leaf::kInt32}, {"emfrac", Leaf::kFloat32}, {"rad", Leaf::kFloat32},
             {"time", Leaf::kFloat32}, {"quality", Leaf::kInt32}});
  add_group(p, "Vertex", 1.5, 8,
            {{"x", Leaf::kFloat32}, {"y", Leaf::kFloat32}, {"z", Leaf::kFloat32}, {"chi2", Leaf::kFloat32},
             {"ntracks", Leaf::kInt32}});
  for (const auto* n : {"md0_d", "ptds_d", "etads_d", "dm_d"}) p.fields.push_back({n, Leaf::kFloat32, Dist::kGaussian, 2.0});
  for (const auto* n : {"ik", "ipi", "ipis"}) p.fields.push_back({n, Leaf::kInt32, Dist::kUniform, 12.0});
  std::size_t i = 0;
  while (p.fields.size() < 152) {
    char name[16];
    std::snprintf(name, sizeof(name), "var%03zu", i);
    if (i % 10 == 9) {
      p.fields.push_back({name, Leaf::kBool, Dist::kLowCardinality, 0.2});
    } else if (i % 5 == 3) {
      p.fields.push_back({name, Leaf::kInt32, int_dist(i), 100.0});
    } else {
      p.fields.push_back({name, Leaf::kFloat32, float_dist(i), 5.0 + static_cast<double>(i % 7)});
    }
    ++i;
  }
  p.read = {"nTrack", "Track_px", "Track_py", "Track_pz", "Track_charge", "Track_nhits", "Track_dedx", "md0_d",
            "ptds_d", "etads_d", "dm_d", "ik", "ipi", "ipis", "nJet", "Jet_pt"};
  return p;
}

Plan cms_plan() {
  Plan p;
  static constexpr std::array<const char*, 31> kGroups = {
      "Muon",     "Electron", "Jet",      "Tau",        "Photon",      "FatJet",         "SubJet",     "GenPart",
      "GenJet",   "TrigObj",  "IsoTrack", "SV",         "LowPtElectron", "boostedTau",   "CorrT1METJet", "SoftActivityJet",
      "Proton",   "PPSLocalTrack", "GenVisTau", "GenDressedLepton", "LHEPart", "OtherPV", "GenJetAK8", "SubGenJetAK8",
      "FsrPhoton", "GenIsolatedPhoton", "HTXSJet", "L1EG", "L1Jet", "L1Mu", "L1Tau"};
  for (std::size_t g = 0; g < kGroups.size(); ++g) {
    const double mean = g == 0 ? 1.5 : (g == 7 ? 20.0 : 2.0 + static_cast<double>(g % 5));
    add_group(p, kGroups[g], mean, 64,
              {{"pt", Leaf::kFloat32}, {"eta", Leaf::kFloat32}, {"phi", Leaf::kFloat32}, {"mass", Leaf::kFloat32},
               {"charge", Leaf::kInt32}, {"dxy", Leaf::kFloat32}, {"dz", Leaf::kFloat32}, {"iso", Leaf::kFloat32},
               {"idx", Leaf::kInt32}});
  }
  p.fields.push_back({"run", Leaf::kUInt32, Dist::kConstant, 1.0});
  p.fields.push_back({"luminosityBlock", Leaf::kUInt32, Dist::kLowCardinality, 50.0});
  p.fields.push_back({"event", Leaf::kUInt64, Dist::kUniform, 1e9});
  std::size_t i = 0;
  while (p.fields.size() < 779) {
    char name[24];
    std::snprintf(name, sizeof(name), "Misc_v%03zu", i);
    p.fields.push_back({name, i % 4 == 3 ? Leaf::kInt32 : Leaf::kFloat32, i % 4 == 3 ? int_dist(i) : float_dist(i),
                        3.0 + static_cast<double>(i % 11)});
    ++i;
  }
  for (std::size_t h = 0; h < 700; ++h) {
    char name[24];
    std::snprintf(name, sizeof(name), "HLT_path%03zu", h);
    p.fields.push_back({name, Leaf::kBool, h % 3 == 0 ? Dist::kConstant : Dist::kLowCardinality, 0.05});
  }
  p.read = {"nMuon", "Muon_pt", "Muon_eta", "Muon_phi", "Muon_mass", "Muon_charge"};
  return p;
}

Plan plan_of(SampleShape shape) {
  switch (shape) {
    case SampleShape::kLhcb: return lhcb_plan();
    case SampleShape::kH1: return h1_plan();
    case SampleShape::kCms: return cms_plan();
  }
  return {};
}

class FieldSampler {
 public:
  FieldSampler(const FieldPlan& plan, Rng& setup) : plan_(plan) {
    center_ = setup.uniform() * plan.scale;
    levels_ = 2 + setup.below(14);
  }

  double real(Rng& rng) const {
    const auto s = plan_.scale;
    switch (plan_.dist) {
      case Dist::kConstant: return rng.chance(0.01) ? center_ + 1.0 : center_;
      case Dist::kLowCardinality: return static_cast<double>(rng.below(levels_)) * s / static_cast<double>(levels_);
      case Dist::kQuantized: return std::round(rng.gaussian(center_, s) * 16.0) / 16.0;
      case Dist::kExponential: return rng.exponential(s);
      case Dist::kGaussian: return rng.gaussian(0.0, s);
      case Dist::kUniform: return rng.uniform() * s;
      case Dist::kSign: return rng.chance(0.5) ? s : -s;
    }
    return 0;
  }

  Value sample(Rng& rng) const {
    switch (plan_.leaf) {
      case Leaf::kBool:
        return Value(plan_.dist == Dist::kConstant ? rng.chance(0.001) : rng.chance(plan_.scale));
      case Leaf::kInt32: return Value(static_cast<std::int32_t>(std::llround(real(rng))));
      case Leaf::kUInt32: return Value(static_cast<std::uint32_t>(std::llround(std::fabs(real(rng)))));
      case Leaf::kUInt64: return Value(static_cast<std::uint64_t>(std::llround(std::fabs(real(rng)))));
      case Leaf::kFloat32: return Value(static_cast<float>(real(rng)));
      case Leaf::kFloat64: return Value(real(rng));
    }
    return {};
  }

 private:
  const FieldPlan& plan_;
  double center_ = 0;
  std::uint64_t levels_ = 2;
};

}  // namespace

ShapeInfo shape_info(SampleShape shape) noexcept {
  switch (shape) {
    case SampleShape::kLhcb: return {"lhcb-like", 8'500'000, 26};
    case SampleShape::kH1: return {"h1-like", 2'800'000, 152};
    case SampleShape::kCms: return {"cms-like", 1'600'000, 1479};
  }
  return {};
}

SampleShape parse_shape(std::string_view name) {
  for (auto s : {SampleShape::kLhcb, SampleShape::kH1, SampleShape::kCms}) {
    const auto full = shape_info(s).name;
    if (name == full || name == full.substr(0, full.size() - 5)) return s;
  }
  raise(ErrorClass::kConfig, "unknown sample shape '" + std::string(name) + "'", "expected lhcb-like, h1-like or cms-like");
}

std::vector<FieldSpec> shape_fields(SampleShape shape) {
  const auto plan = plan_of(shape);
  std::vector<FieldSpec> out;
  for (const auto& f : plan.fields) {
    if (f.group >= 0 && !f.counter) {
      out.push_back(FieldSpec::collection(f.name, leaf_spec("item", f.leaf)));
    } else {
      out.push_back(leaf_spec(f.name, f.leaf));
    }
  }
  return out;
}

std::vector<std::string> shape_read_fields(SampleShape shape) { return plan_of(shape).read; }

std::uint64_t shape_entries(SampleShape shape, double scale) {
  if (!(scale > 0)) raise(ErrorClass::kConfig, "scale must be positive");
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(static_cast<double>(shape_info(shape).full_entries) * scale)));
}

std::uint64_t generate(SampleShape shape, const GenerateOptions& options, Container target) {
  const auto plan = plan_of(shape);
  const auto entries = shape_entries(shape, options.scale);
  DatasetModel model(shape_fields(shape));
  auto writer = Writer::create(model, options.dataset_name, std::move(target), options.write);

  Rng setup(options.seed ^ 0x5eed5eed5eed5eedull);
  std::vector<FieldSampler> samplers;
  samplers.reserve(plan.fields.size());
  for (const auto& f : plan.fields) samplers.emplace_back(f, setup);

  Rng rng(options.seed);
  auto entry = writer->create_entry();
  std::vector<std::uint64_t> sizes(plan.groups.size());
  for (std::uint64_t e = 0; e < entries; ++e) {
    for (std::size_t g = 0; g < plan.groups.size(); ++g) {
      sizes[g] = std::min<std::uint64_t>(plan.groups[g].max_size,
                                         static_cast<std::uint64_t>(rng.exponential(plan.groups[g].mean_size)));
    }
    for (std::size_t i = 0; i < plan.fields.size(); ++i) {
      const auto& f = plan.fields[i];
      auto& v = entry.at(i);
      if (f.group < 0) {
        v = samplers[i].sample(rng);
      } else if (f.counter) {
        v = Value(static_cast<std::uint32_t>(sizes[static_cast<std::size_t>(f.group)]));
      } else {
        if (!v.is<Value::List>()) v = Value::list({});
        auto& items = v.items();
        items.resize(sizes[static_cast<std::size_t>(f.group)]);
        for (auto& item : items) item = samplers[i].sample(rng);
      }
    }
    writer->fill(entry);
  }
  writer->commit();
  return entries;
}

}  // namespace colstore
