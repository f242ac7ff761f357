// Command-line front end: fixture generation, model training, search, crawl,
// classification, the two acquisition paths, evaluation, and reporting.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "paperharvest/pipeline.hpp"

namespace ph = paperharvest;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Splits "https://host[:port]" + path for httplib.
struct SplitUrl {
  std::string origin, path;
};

SplitUrl split_origin(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ph::InvalidUrlError("expected absolute URL: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

class LiveHttpFetcher : public ph::crawler::HttpFetcher {
 public:
  explicit LiveHttpFetcher(std::string user_agent) : user_agent_(std::move(user_agent)) {}

  ph::crawler::FetchResponse get(const std::string& canonical_url, int timeout_ms) override {
    SplitUrl parts;
    try {
      parts = split_origin(canonical_url);
    } catch (const ph::InvalidUrlError&) {
      return {0, "", ""};
    }
    httplib::Client client(parts.origin);
    client.set_connection_timeout(0, timeout_ms * 1000);
    client.set_read_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
    client.set_follow_location(true);
    auto res = client.Get(parts.path, {{"User-Agent", user_agent_}});
    if (!res) return {0, "", ""};
    std::string content_type;
    if (res->has_header("Content-Type")) content_type = res->get_header_value("Content-Type");
    return {res->status, content_type, res->body};
  }

 private:
  std::string user_agent_;
};

ph::search::LiveBackend::Transport make_live_transport() {
  return [](const std::string& url, int timeout_ms) -> std::pair<int, std::string> {
    SplitUrl parts = split_origin(url);
    httplib::Client client(parts.origin);
    client.set_read_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
    auto res = client.Get(parts.path);
    if (!res) return {0, ""};
    return {res->status, res->body};
  };
}

std::unique_ptr<ph::search::SearchBackend> make_backend(const ph::pipeline::PipelineConfig& c) {
  if (c.backend == "fixture") {
    if (c.search_fixture.empty())
      throw ph::InvalidInputError("fixture backend requires search.fixture");
    return std::make_unique<ph::search::FixtureBackend>(
        ph::search::FixtureBackend::load(c.search_fixture));
  }
  if (c.backend == "live") {
    if (c.live.endpoint.empty())
      throw ph::InvalidInputError("live backend requires search.endpoint");
    return std::make_unique<ph::search::LiveBackend>(c.live, make_live_transport());
  }
  throw ph::InvalidInputError("unknown backend: " + c.backend);
}

std::unique_ptr<ph::crawler::HttpFetcher> make_fetcher(const ph::pipeline::PipelineConfig& c) {
  if (c.backend == "fixture") {
    if (c.site_map.empty()) throw ph::InvalidInputError("fixture backend requires crawl.site_map");
    return std::make_unique<ph::crawler::FixtureFetcher>(ph::pipeline::load_site_map(c.site_map));
  }
  return std::make_unique<LiveHttpFetcher>(ph::crawler::CrawlJob{}.user_agent);
}

struct TrainedArtifacts {
  ph::ltr::LinearRankModel ranker;
  ph::features::DictionarySet dicts;
  ph::forest::RandomForestModel classifier;
};

TrainedArtifacts load_models(const ph::pipeline::PipelineConfig& c) {
  if (c.ranker_model.empty() || c.dictionaries.empty() || c.classifier_model.empty())
    throw ph::InvalidInputError("config must set models.ranker, models.dictionaries, models.classifier");
  TrainedArtifacts a;
  a.ranker = ph::ltr::rank_model_from_json(ph::pipeline::read_json(c.ranker_model));
  a.dicts = ph::features::dictionaries_from_json(ph::pipeline::read_json(c.dictionaries));
  a.classifier = ph::forest::forest_from_json(ph::pipeline::read_json(c.classifier_model));
  return a;
}

json fetch_record_json(const ph::crawler::FetchRecord& r) {
  json j = {{"url", r.url},
            {"depth", r.depth},
            {"seed", r.seed},
            {"status", ph::crawler::fetch_status_name(r.status)}};
  if (r.http_status) j["http_status"] = *r.http_status;
  if (!r.content_hash.empty()) j["content_hash"] = r.content_hash;
  return j;
}

void emit(const json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    ph::pipeline::write_file(out, j.dump(2) + "\n");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"paperharvest: search-driven research document acquisition"};
  app.require_subcommand(1);

  std::string config_path, out_path, backend_override;
  std::uint64_t seed = 0;
  bool seed_set = false;
  app.add_option("--config", config_path, "INI-style configuration file")->type_name("FILE");
  app.add_option("--out", out_path, "output file or directory");
  app.add_option_function<std::uint64_t>(
         "--seed", [&](std::uint64_t v) { seed = v; seed_set = true; }, "override pipeline seed")
      ->type_name("UINT");
  app.add_option("--backend", backend_override, "search backend")
      ->check(CLI::IsMember({"live", "fixture"}));

  auto* cmd_gen = app.add_subcommand("generate-fixtures", "write the deterministic fixture corpus");
  auto* cmd_train_ranker = app.add_subcommand("train-ranker", "fit the pairwise homepage ranker");
  std::string opt_fixture, opt_labels, opt_train, opt_test, opt_model, opt_doc_path, opt_query;
  std::string opt_titles, opt_names, opt_manifest, opt_format = "tsv", opt_kind = "title";
  int opt_folds = 5;
  cmd_train_ranker->add_option("--fixture", opt_fixture, "recorded search results (jsonl)");
  cmd_train_ranker->add_option("--labels", opt_labels, "homepage rank labels (json)");

  auto* cmd_train_clf = app.add_subcommand("train-classifier", "fit the document forest");
  cmd_train_clf->add_option("--train", opt_train, "labeled documents (jsonl)");

  auto* cmd_search = app.add_subcommand("search", "run one query against the backend");
  cmd_search->add_option("--query", opt_query, "title or author name")->required();
  cmd_search->add_option("--kind", opt_kind, "query kind")->check(CLI::IsMember({"title", "author"}));

  auto* cmd_crawl = app.add_subcommand("crawl", "breadth-first crawl from one seed");
  std::string opt_seed_url;
  cmd_crawl->add_option("--seed-url", opt_seed_url, "crawl start page")->required();

  auto* cmd_classify = app.add_subcommand("classify", "label one document");
  cmd_classify->add_option("--doc", opt_doc_path, "document file")->required();

  auto* cmd_path1 = app.add_subcommand("run-path1", "title-query acquisition");
  cmd_path1->add_option("--titles", opt_titles, "one title per line");
  auto* cmd_path2 = app.add_subcommand("run-path2", "author-crawl acquisition");
  cmd_path2->add_option("--names", opt_names, "one author name per line");

  auto* cmd_eval = app.add_subcommand("eval", "cross-validate ranker, evaluate classifier");
  cmd_eval->add_option("--fixture", opt_fixture, "recorded search results (jsonl)");
  cmd_eval->add_option("--labels", opt_labels, "homepage rank labels (json)");
  cmd_eval->add_option("--train", opt_train, "classifier training docs (jsonl)");
  cmd_eval->add_option("--test", opt_test, "classifier held-out docs (jsonl)");
  cmd_eval->add_option("--folds", opt_folds, "cross-validation folds");

  auto* cmd_report = app.add_subcommand("report", "render a stored manifest");
  cmd_report->add_option("--manifest", opt_manifest, "manifest json")->required();
  cmd_report->add_option("--format", opt_format, "tsv or json")
      ->check(CLI::IsMember({"tsv", "json"}));

  // let --config/--seed/--out/--backend appear after the subcommand name
  for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; }))
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    ph::pipeline::PipelineConfig config;
    if (!config_path.empty()) config = ph::pipeline::load_config(config_path);
    if (seed_set) config.seed = seed;
    if (!backend_override.empty()) config.backend = backend_override;

    if (cmd_gen->parsed()) {
      if (out_path.empty()) throw ph::InvalidInputError("generate-fixtures requires --out DIR");
      ph::fixtures::FixtureSpec spec;
      spec.seed = config.seed;
      ph::fixtures::generate_fixtures(spec, out_path);
      std::cout << "fixtures written to " << out_path << "\n";
      return 0;
    }

    if (cmd_train_ranker->parsed()) {
      std::string fixture = opt_fixture.empty() ? config.search_fixture : opt_fixture;
      if (fixture.empty() || opt_labels.empty())
        throw ph::InvalidInputError("train-ranker requires --fixture and --labels");
      if (out_path.empty()) throw ph::InvalidInputError("train-ranker requires --out DIR");
      auto pages = ph::pipeline::load_labeled_pages(fixture, opt_labels, config.top_k);
      ph::ltr::TrainConfig tc;
      tc.seed = config.seed;
      auto trained = ph::pipeline::train_ranker(pages, tc);
      fs::create_directories(out_path);
      ph::pipeline::write_file(fs::path(out_path) / "ranker.json",
                               ph::ltr::rank_model_to_json(trained.model).dump(2) + "\n");
      ph::pipeline::write_file(fs::path(out_path) / "dictionaries.json",
                               ph::features::dictionaries_to_json(trained.dicts).dump(2) + "\n");
      std::cout << "ranker trained on " << pages.size() << " queries, dim "
                << trained.dicts.dim() << "\n";
      return 0;
    }

    if (cmd_train_clf->parsed()) {
      if (opt_train.empty() || out_path.empty())
        throw ph::InvalidInputError("train-classifier requires --train and --out FILE");
      std::vector<ph::forest::FeatureRow> X;
      std::vector<int> y;
      ph::pipeline::load_classifier_docs(opt_train, X, y);
      ph::forest::ForestConfig fc;
      fc.seed = config.seed;
      auto model = ph::forest::train_forest(X, y, fc);
      ph::pipeline::write_file(out_path, ph::forest::forest_to_json(model).dump() + "\n");
      std::cout << "forest trained on " << X.size() << " documents\n";
      return 0;
    }

    if (cmd_search->parsed()) {
      auto backend = make_backend(config);
      auto query = opt_kind == "author" ? ph::search::build_author_query(opt_query, config.top_k)
                                        : ph::search::build_title_query(opt_query, config.top_k);
      auto page = ph::search::execute(query, *backend);
      json results = json::array();
      for (const auto& r : page.results)
        results.push_back({{"rank", r.rank}, {"url", r.url}, {"title", r.page_title},
                           {"snippet", r.snippet}});
      emit({{"query", query.rendered}, {"results", results}}, out_path);
      return 0;
    }

    if (cmd_crawl->parsed()) {
      auto fetcher = make_fetcher(config);
      ph::crawler::CrawlJob job;
      job.seeds = {opt_seed_url};
      job.max_depth = config.max_depth;
      job.politeness.per_host_delay_ms = config.per_host_delay_ms;
      job.politeness.max_pages = config.max_pages;
      job.politeness.obey_robots = config.obey_robots;
      auto records = ph::crawler::crawl(job, *fetcher);
      json out = json::array();
      for (const auto& r : records) out.push_back(fetch_record_json(r));
      emit(out, out_path);
      return 0;
    }

    if (cmd_classify->parsed()) {
      auto artifacts = load_models(config);
      auto d = ph::doc::ingest_document(ph::pipeline::read_file(opt_doc_path));
      auto f = ph::doc::extract_structural_features(d);
      auto pred = ph::forest::predict(artifacts.classifier,
                                      ph::forest::FeatureRow(f.values.begin(), f.values.end()));
      emit({{"label", pred.label == 1 ? "paper" : "non_paper"}, {"score", pred.score}}, out_path);
      return 0;
    }

    if (cmd_path1->parsed() || cmd_path2->parsed()) {
      if (config.store_root.empty()) throw ph::InvalidInputError("config must set store.root");
      auto artifacts = load_models(config);
      auto backend = make_backend(config);
      auto fetcher = make_fetcher(config);
      ph::store::DocStore docstore(config.store_root);
      ph::pipeline::PipelineContext ctx;
      ctx.backend = backend.get();
      ctx.fetcher = fetcher.get();
      ctx.store = &docstore;
      ctx.classifier = &artifacts.classifier;
      ctx.ranker = &artifacts.ranker;
      ctx.dicts = &artifacts.dicts;
      ctx.config = config;

      ph::store::Manifest manifest;
      fs::path manifest_path = fs::path(config.store_root) / "manifest.json";
      if (fs::exists(manifest_path))
        manifest = ph::store::manifest_from_json(ph::pipeline::read_json(manifest_path));

      if (cmd_path1->parsed()) {
        if (opt_titles.empty()) throw ph::InvalidInputError("run-path1 requires --titles FILE");
        ph::pipeline::run_path1(ph::pipeline::load_lines(opt_titles), ctx, manifest);
      } else {
        if (opt_names.empty()) throw ph::InvalidInputError("run-path2 requires --names FILE");
        auto log = ph::pipeline::run_path2(ph::pipeline::load_lines(opt_names), ctx, manifest);
        for (const auto& entry : log)
          std::cerr << entry.name << " -> " << entry.outcome << "\n";
      }
      if (!config.targets.empty()) {
        auto targets = ph::pipeline::load_targets(config.targets);
        auto matches = ph::pipeline::finalize_manifest(docstore, targets, manifest);
        std::cerr << "targets recovered: " << matches.hits.size() << "/" << targets.size()
                  << "\n";
      }
      ph::pipeline::write_file(manifest_path,
                               ph::store::manifest_to_json(manifest).dump(2) + "\n");
      std::cout << ph::store::manifest_to_tsv(manifest);
      return 0;
    }

    if (cmd_eval->parsed()) {
      json report;
      if (!opt_fixture.empty() && !opt_labels.empty()) {
        auto pages = ph::pipeline::load_labeled_pages(opt_fixture, opt_labels, config.top_k);
        ph::ltr::TrainConfig tc;
        tc.seed = config.seed;
        auto cv = ph::pipeline::cross_validate_ranker(pages, opt_folds, tc);
        report["ranker"] = {{"folds", opt_folds},
                            {"rank_svm_accuracy", cv.rank_svm_accuracy},
                            {"baseline_accuracy", cv.baseline_accuracy}};
      }
      if (!opt_train.empty() && !opt_test.empty()) {
        std::vector<ph::forest::FeatureRow> Xtr, Xte;
        std::vector<int> ytr, yte;
        ph::pipeline::load_classifier_docs(opt_train, Xtr, ytr);
        ph::pipeline::load_classifier_docs(opt_test, Xte, yte);
        ph::forest::ForestConfig fc;
        fc.seed = config.seed;
        auto model = ph::forest::train_forest(Xtr, ytr, fc);
        auto eval = ph::forest::evaluate_classifier(model, Xte, yte);
        report["classifier"] = {{"paper_f1", eval.per_class[1].f1},
                                {"paper_precision", eval.per_class[1].precision},
                                {"paper_recall", eval.per_class[1].recall},
                                {"weighted_f1", eval.weighted.f1}};
      }
      if (report.empty())
        throw ph::InvalidInputError("eval: provide --fixture/--labels and/or --train/--test");
      emit(report, out_path);
      return 0;
    }

    if (cmd_report->parsed()) {
      auto manifest = ph::store::manifest_from_json(ph::pipeline::read_json(opt_manifest));
      auto format = opt_format == "json" ? ph::store::ReportFormat::json
                                         : ph::store::ReportFormat::tsv;
      if (out_path.empty()) {
        if (format == ph::store::ReportFormat::tsv)
          std::cout << ph::store::manifest_to_tsv(manifest);
        else
          std::cout << ph::store::manifest_to_json(manifest).dump(2) << "\n";
      } else {
        ph::store::export_report(manifest, format, out_path);
      }
      return 0;
    }

    throw ph::InvalidInputError("no subcommand handled");
  } catch (const ph::BackendError& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return 3;
  } catch (const ph::ThrottledError& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return 3;
  } catch (const ph::ParseError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const ph::IoError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
