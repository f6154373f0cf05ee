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


// colstore command-line tool.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "colstore/codec.hpp"
#include "colstore/dataset_tools.hpp"
#include "colstore/error.hpp"
#include "colstore/gen.hpp"
#include "colstore/reader.hpp"
#include "colstore/text_io.hpp"
#include "colstore/writer.hpp"

namespace {

using namespace colstore;
using json = nlohmann::ordered_json;

struct CommonFlags {
  std::uint64_t region_offset = 0;
  std::string name;
};

struct WriteFlags {
  std::string codec = "zstd";
  std::uint32_t page_size = 64 * 1024;
  std::uint64_t cluster_size = 32ull * 1024 * 1024;
  bool no_checksums = false;
  bool overwrite = false;

  WriteOptions options() const {
    WriteOptions o;
    o.codec = parse_codec(codec);
    o.page_size = page_size;
    o.cluster_size = cluster_size;
    o.page_checksums = !no_checksums;
    o.validate();
    return o;
  }
};

void add_write_flags(CLI::App& cmd, WriteFlags& w) {
  cmd.add_option("--codec", w.codec, "none|zlib|zstd|lz4|lzma or 0-4")->capture_default_str();
  cmd.add_option("--page-size", w.page_size, "Target page size in bytes")->capture_default_str();
  cmd.add_option("--cluster-size", w.cluster_size, "Target cluster size in bytes")->capture_default_str();
  cmd.add_flag("--no-checksums", w.no_checksums, "Omit per-page checksums");
  cmd.add_flag("--overwrite", w.overwrite, "Replace an existing output file");
}

Container open_output(const std::string& path, bool overwrite, std::uint64_t region_offset) {
  auto device = FileDevice::open(path, overwrite ? FileDevice::Mode::kOverwrite : FileDevice::Mode::kCreate);
  return Container::embedded(std::move(device), region_offset);
}

std::vector<std::string> split_list(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// inspect

struct ColumnTotals {
  std::uint64_t pages = 0;
  std::uint64_t compressed = 0;
  std::uint64_t uncompressed = 0;
  std::uint64_t elements = 0;
};

int run_inspect(const std::string& path, const CommonFlags& common, const std::string& format) {
  auto container = Container::open_file(path, common.region_offset);
  const auto file_size = container.device->size();
  auto source = PageSource::open(container, common.name);
  const auto& schema = source->schema();
  const auto& footer = source->footer();
  const auto& env = source->envelope();

  std::vector<ColumnTotals> columns(schema.columns().size());
  std::uint64_t page_bytes = 0;
  for (const auto& cluster : footer.clusters) {
    for (std::size_t c = 0; c < cluster.pages.size(); ++c) {
      for (const auto& p : cluster.pages[c]) {
        columns[c].pages += 1;
        columns[c].compressed += p.range.compressed_size;
        columns[c].uncompressed += p.range.uncompressed_size;
        columns[c].elements += p.element_count;
        page_bytes += p.range.compressed_size;
      }
    }
  }
  const std::uint64_t header_bytes = env.header_locator.compressed_size;
  const std::uint64_t footer_bytes = env.footer_locator.compressed_size;
  const std::uint64_t accounted = common.region_offset + kEnvelopeSize + header_bytes + footer_bytes + page_bytes;
  if (accounted > file_size) raise(ErrorClass::kFormat, "stored sizes exceed the file length", path);
  const std::uint64_t slack = file_size - accounted;

  std::map<ColumnId, std::string> column_path;
  for (const auto& col : schema.columns()) column_path[col.column_id] = schema.path_of(col.owner_field);

  if (format == "json") {
    json j;
    j["file"] = path;
    j["dataset"] = source->header().dataset_name;
    j["entries"] = footer.total_entries;
    j["top_level_fields"] = schema.top_level().size();
    j["fields"] = schema.fields().size() - 1;
    j["columns"] = json::array();
    for (const auto& col : schema.columns()) {
      const auto& t = columns[col.column_id];
      j["columns"].push_back({{"id", col.column_id},
                              {"field", column_path[col.column_id]},
                              {"role", column_role_name(col.role)},
                              {"type", physical_type_name(col.type)},
                              {"pages", t.pages},
                              {"elements", t.elements},
                              {"compressed_bytes", t.compressed},
                              {"uncompressed_bytes", t.uncompressed}});
    }
    j["clusters"] = json::array();
    for (const auto& c : footer.clusters) {
      j["clusters"].push_back({{"first_entry", c.first_entry},
                               {"entries", c.entry_count},
                               {"region_offset", c.region_offset},
                               {"region_size", c.region_size}});
    }
    j["bytes"] = {{"host_prefix", common.region_offset}, {"envelope", kEnvelopeSize}, {"header", header_bytes},
                  {"footer", footer_bytes},           {"pages", page_bytes},         {"slack", slack},
                  {"total", file_size}};
    std::cout << j.dump(2) << '\n';
    return 0;
  }

  std::cout << "dataset   " << source->header().dataset_name << '\n'
            << "entries   " << footer.total_entries << '\n'
            << "fields    " << schema.top_level().size() << " top-level, " << schema.fields().size() - 1 << " total\n"
            << "columns   " << schema.columns().size() << '\n'
            << "clusters  " << footer.clusters.size() << '\n'
            << "checksums " << (source->has_page_checksums() ? "yes" : "no") << "\n\nschema\n";
  std::istringstream tree(schema.dump());
  for (std::string line; std::getline(tree, line);) std::cout << "  " << line << '\n';

  std::cout << "\ncolumns\n  " << std::left << std::setw(6) << "id" << std::setw(32) << "field" << std::setw(11)
            << "role" << std::setw(9) << "type" << std::right << std::setw(8) << "pages" << std::setw(14)
            << "compressed" << std::setw(14) << "uncompressed" << '\n';
  for (const auto& col : schema.columns()) {
    const auto& t = columns[col.column_id];
    std::cout << "  " << std::left << std::setw(6) << col.column_id << std::setw(32) << column_path[col.column_id]
              << std::setw(11) << column_role_name(col.role) << std::setw(9) << physical_type_name(col.type)
              << std::right << std::setw(8) << t.pages << std::setw(14) << t.compressed << std::setw(14)
              << t.uncompressed << '\n';
  }
  std::cout << "\nclusters\n";
  for (std::size_t i = 0; i < footer.clusters.size(); ++i) {
    const auto& c = footer.clusters[i];
    std::cout << "  #" << i << "  entries [" << c.first_entry << ", " << c.first_entry + c.entry_count
              << ")  region " << c.region_offset << " + " << c.region_size << '\n';
  }
  std::cout << "\nbytes\n";
  if (common.region_offset != 0) std::cout << "  host prefix " << common.region_offset << '\n';
  std::cout << "  envelope    " << kEnvelopeSize << '\n'
            << "  header      " << header_bytes << '\n'
            << "  footer      " << footer_bytes << '\n'
            << "  pages       " << page_bytes << '\n'
            << "  slack       " << slack << '\n'
            << "  total       " << file_size << '\n';
  return 0;
}

// bench

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

std::uint64_t checksum(const Value& v, std::uint64_t h) {
  const auto& d = v.data();
  if (const auto* b = std::get_if<bool>(&d)) return mix(h, *b ? 1 : 2);
  if (const auto* i = std::get_if<std::int64_t>(&d)) return mix(h, static_cast<std::uint64_t>(*i));
  if (const auto* u = std::get_if<std::uint64_t>(&d)) return mix(h, *u);
  if (const auto* f = std::get_if<float>(&d)) return mix(h, std::bit_cast<std::uint32_t>(*f));
  if (const auto* x = std::get_if<double>(&d)) return mix(h, std::bit_cast<std::uint64_t>(*x));
  if (const auto* s = std::get_if<std::string>(&d)) return mix(h, std::hash<std::string>{}(*s));
  if (const auto* l = std::get_if<Value::List>(&d)) {
    h = mix(h, l->size());
    for (const auto& item : *l) h = checksum(item, h);
    return h;
  }
  if (const auto* var = std::get_if<VariantValue>(&d)) return checksum(var->payload(), mix(h, var->alternative()));
  return mix(h, 0);
}

struct BenchFlags {
  std::string columns;
  unsigned streams = 1;
  unsigned readahead = 1;
  std::uint64_t gap_threshold = 16 * 1024;
  std::uint64_t max_request = 8ull * 1024 * 1024;
  unsigned repetitions = 1;
  bool warm = false;
  bool mapped = false;
  std::string report;
};

struct Repetition {
  double seconds = 0;
  ReadCounters counters;
  std::uint64_t checksum = 0;
  unsigned peak_streams = 0;
};

int run_bench(const std::string& path, const CommonFlags& common, const BenchFlags& flags, const std::string& format) {
  ReaderOptions options;
  options.scheduler.stream_count = flags.streams;
  options.scheduler.readahead_clusters = flags.readahead;
  options.scheduler.gap_threshold = flags.gap_threshold;
  options.scheduler.max_request_bytes = flags.max_request;
  options.scheduler.validate();
  options.access = flags.mapped ? AccessMode::kMapped : AccessMode::kExplicit;
  if (flags.repetitions == 0) raise(ErrorClass::kConfig, "--repetitions must be at least 1");

  auto open = [&] { return Reader::open(Container::open_file(path, common.region_offset), common.name, nullptr, options); };
  auto reader = open();
  auto names = split_list(flags.columns);
  if (names.empty()) {
    for (auto id : reader->schema().top_level()) names.push_back(reader->schema().field(id).name);
  }
  const auto entries = reader->entry_count();
  const std::uint64_t total_bytes = reader->source().payload_bytes() + reader->source().metadata_bytes();

  std::vector<Repetition> reps;
  for (unsigned r = 0; r < flags.repetitions; ++r) {
    if (!flags.warm && r > 0) reader = open();
    reader->source().reset_counters();
    Repetition rep;
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<ValueView> views;
    views.reserve(names.size());
    for (const auto& n : names) views.push_back(reader->value_view(n));
    std::uint64_t h = 0;
    for (auto e : reader->entries()) {
      for (auto& v : views) h = checksum(v(e), h);
    }
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.counters = reader->counters();
    rep.checksum = h;
    rep.peak_streams = reader->cluster_pool().peak_streams();
    reps.push_back(rep);
  }

  double total_seconds = 0;
  for (const auto& r : reps) total_seconds += r.seconds;
  const auto& first = reps.front();
  for (const auto& r : reps) {
    if (r.checksum != first.checksum) raise(ErrorClass::kConsistency, "checksum differs between repetitions");
  }
  auto rate = [&](const Repetition& r) { return r.seconds > 0 ? static_cast<double>(entries) / r.seconds : 0.0; };

  json j;
  j["file"] = path;
  j["mode"] = flags.warm ? "warm" : "cold";
  j["access"] = flags.mapped ? "mapped" : "explicit";
  j["columns"] = names;
  j["streams"] = flags.streams;
  j["readahead"] = flags.readahead;
  j["gap_threshold"] = flags.gap_threshold;
  j["entries"] = entries;
  j["file_payload_and_metadata_bytes"] = total_bytes;
  j["repetitions"] = json::array();
  for (const auto& r : reps) {
    j["repetitions"].push_back({{"wall_seconds", r.seconds},
                                {"entries_per_second", rate(r)},
                                {"bytes_read", r.counters.bytes_read},
                                {"requests", r.counters.requests},
                                {"pages_decoded", r.counters.pages_decoded},
                                {"peak_streams", r.peak_streams}});
  }
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << first.checksum;
  j["checksum"] = hex.str();

  if (!flags.report.empty()) {
    std::ofstream out(flags.report);
    if (!out) raise(ErrorClass::kIo, "cannot write report", flags.report);
    out << j.dump(2) << '\n';
  }

  if (format == "metrics") {
    std::cout << "entries=" << entries << '\n' << "columns=" << names.size() << '\n';
    for (std::size_t i = 0; i < reps.size(); ++i) {
      const auto& r = reps[i];
      std::cout << "rep=" << i << " wall_seconds=" << r.seconds << " entries_per_second=" << rate(r)
                << " bytes_read=" << r.counters.bytes_read << " requests=" << r.counters.requests
                << " pages_decoded=" << r.counters.pages_decoded << '\n';
    }
    std::cout << "wall_seconds=" << total_seconds << '\n'
              << "entries_per_second=" << (total_seconds > 0 ? static_cast<double>(entries) * reps.size() / total_seconds : 0.0)
              << '\n'
              << "bytes_read=" << first.counters.bytes_read << '\n'
              << "requests=" << first.counters.requests << '\n'
              << "total_bytes=" << total_bytes << '\n'
              << "read_fraction=" << (total_bytes ? static_cast<double>(first.counters.bytes_read) / total_bytes : 0.0) << '\n'
              << "peak_streams=" << first.peak_streams << '\n'
              << "checksum=" << hex.str() << '\n';
  } else {
    std::cout << "read " << names.size() << " field(s) of " << entries << " entries, " << reps.size() << ' '
              << (flags.warm ? "warm" : "cold") << " repetition(s)\n";
    for (std::size_t i = 0; i < reps.size(); ++i) {
      const auto& r = reps[i];
      std::cout << "  #" << i << "  " << std::fixed << std::setprecision(4) << r.seconds << " s  "
                << std::setprecision(0) << rate(r) << " entries/s  " << r.counters.bytes_read << " bytes in "
                << r.counters.requests << " requests\n";
    }
    std::cout << std::defaultfloat << "  first pass read " << first.counters.bytes_read << " of " << total_bytes
              << " bytes\n  checksum " << hex.str() << '\n';
  }
  return 0;
}

int run_validate(const std::string& path, const CommonFlags& common) {
  const auto report = validate_dataset(Container::open_file(path, common.region_offset));
  for (const auto& p : report.problems) std::cout << "problem: " << p << '\n';
  std::cout << "clusters=" << report.clusters << " offset_columns=" << report.offset_columns_checked
            << " elements=" << report.elements_checked << " status=" << (report.ok() ? "ok" : "invalid") << '\n';
  if (!report.ok()) {
    std::cerr << "error[" << error_class_name(ErrorClass::kCorruption) << "]: " << report.problems.size()
              << " invariant violation(s)\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"colstore: columnar dataset tool"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  CommonFlags common;
  WriteFlags write;
  std::string format = "text";

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--region-offset", common.region_offset, "Byte offset of the dataset inside a host file");
    cmd->add_option("--name", common.name, "Expected / output dataset name");
  };

  std::string input;
  std::string output;

  auto* inspect = app.add_subcommand("inspect", "Print schema, columns, clusters and byte totals");
  inspect->add_option("file", input)->required();
  inspect->add_option("--format", format, "text|json")->check(CLI::IsMember({"text", "json"}));
  add_common(inspect);

  std::string shape;
  std::uint64_t seed = 1;
  double scale = 0.01;
  auto* generate = app.add_subcommand("generate", "Write a synthetic benchmark sample");
  generate->add_option("shape", shape, "lhcb-like|h1-like|cms-like")->required();
  generate->add_option("-o,--output", output)->required();
  generate->add_option("--seed", seed)->capture_default_str();
  generate->add_option("--scale", scale, "Fraction of the full entry count")->capture_default_str();
  add_write_flags(*generate, write);
  add_common(generate);

  std::vector<std::string> inputs;
  auto* merge = app.add_subcommand("merge", "Concatenate datasets without re-encoding");
  merge->add_option("inputs", inputs)->required();
  merge->add_option("-o,--output", output)->required();
  merge->add_flag("--overwrite", write.overwrite);

  std::string columns;
  auto* exporter = app.add_subcommand("export", "Write entries as text lines");
  exporter->add_option("file", input)->required();
  exporter->add_option("-o,--output", output, "Output file (default stdout)");
  exporter->add_option("--columns", columns, "Comma-separated top-level fields");
  add_common(exporter);

  std::string schema_from;
  auto* importer = app.add_subcommand("import", "Write a dataset from text lines");
  importer->add_option("file", input, "Text input (- for stdin)")->required();
  importer->add_option("-o,--output", output)->required();
  importer->add_option("--schema-from", schema_from, "Dataset whose schema and name to use")->required();
  add_write_flags(*importer, write);
  add_common(importer);

  BenchFlags bench;
  auto* bencher = app.add_subcommand("bench", "Timed, instrumented read of selected fields");
  bencher->add_option("file", input)->required();
  bencher->add_option("--columns", bench.columns, "Comma-separated top-level fields (default all)");
  bencher->add_option("--streams", bench.streams)->capture_default_str();
  bencher->add_option("--readahead", bench.readahead)->capture_default_str();
  bencher->add_option("--gap-threshold", bench.gap_threshold)->capture_default_str();
  bencher->add_option("--max-request", bench.max_request)->capture_default_str();
  bencher->add_option("--repetitions", bench.repetitions)->capture_default_str();
  auto* cold = bencher->add_flag("--cold", "Re-open the file for every repetition (default)");
  bencher->add_flag("--warm", bench.warm, "Keep the reader and its pages across repetitions")->excludes(cold);
  bencher->add_flag("--mapped", bench.mapped, "Serve pages from a file mapping");
  bencher->add_option("--report", bench.report, "Also write a JSON report to this file");
  bencher->add_option("--format", format, "text|metrics")->check(CLI::IsMember({"text", "metrics"}));
  add_common(bencher);

  auto* validate = app.add_subcommand("validate", "Check column invariants of every cluster");
  validate->add_option("file", input)->required();
  add_common(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error[" << error_class_name(ErrorClass::kConfig) << "]: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*inspect) return run_inspect(input, common, format);
    if (*generate) {
      GenerateOptions g;
      g.seed = seed;
      g.scale = scale;
      g.write = write.options();
      if (!common.name.empty()) g.dataset_name = common.name;
      const auto s = parse_shape(shape);
      const auto n = colstore::generate(s, g, open_output(output, write.overwrite, common.region_offset));
      std::cout << "wrote " << n << " entries of " << shape_info(s).name << " to " << output << '\n';
      return 0;
    }
    if (*merge) {
      fast_merge(inputs, output, write.overwrite);
      std::cout << "merged " << inputs.size() << " datasets into " << output << '\n';
      return 0;
    }
    if (*exporter) {
      auto reader = Reader::open(Container::open_file(input, common.region_offset), common.name);
      const auto fields = split_list(columns);
      if (output.empty()) {
        export_text(*reader, std::cout, fields);
      } else {
        std::ofstream out(output);
        if (!out) raise(ErrorClass::kIo, "cannot open output", output);
        export_text(*reader, out, fields);
      }
      return 0;
    }
    if (*importer) {
      auto source = PageSource::open(Container::open_file(schema_from));
      auto model = DatasetModel::from_schema(source->schema());
      const auto name = common.name.empty() ? source->header().dataset_name : common.name;
      auto writer = Writer::create(model, name, open_output(output, write.overwrite, common.region_offset), write.options());
      std::uint64_t n = 0;
      if (input == "-") {
        n = import_text(std::cin, *writer);
      } else {
        std::ifstream in(input);
        if (!in) raise(ErrorClass::kIo, "cannot open input", input);
        n = import_text(in, *writer);
      }
      writer->commit();
      std::cout << "imported " << n << " entries into " << output << '\n';
      return 0;
    }
    if (*bencher) return run_bench(input, common, bench, format);
    if (*validate) return run_validate(input, common);
  } catch (const std::exception& e) {
    const auto cls = error_class_name(classify(e));
    auto text = describe(e);
    if (text.starts_with(std::string(cls) + ": ")) text.erase(0, cls.size() + 2);
    std::cerr << "error[" << cls << "]: " << text << '\n';
    return 2;
  }
  return 0;
}
