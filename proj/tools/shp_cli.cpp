// Command-line front end. All computation goes through the C API in
// superhedge.h; this file only assembles the configuration JSON, dispatches
// one subcommand, and routes summary/error JSON to stdout/stderr.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "superhedge.h"

namespace {

using Json = nlohmann::ordered_json;

struct CliOptions {
    std::string config_path;
    std::string out_dir;
    std::string eps_list;
    std::string mode;
    std::uint64_t seed = 0;
    bool allow_degenerate = false;
    bool quick = false;
};

int emit_error(const char* kind, const std::string& message) {
    Json e;
    e["error"]["kind"] = kind;
    e["error"]["invariant"] = "the command line provides a readable configuration";
    e["error"]["message"] = message;
    e["error"]["class"] = 1;
    std::fprintf(stderr, "%s\n", e.dump(2).c_str());
    return 1;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Superhedging under proportional transaction costs: exact cones, "
                 "tree recursions, and consistency checks"};
    app.require_subcommand(1);
    app.fallthrough();   // allow global options to appear after the subcommand
    app.set_version_flag("--version", "shp api " + std::to_string(shp_api_version()));

    CliOptions opt;
    app.add_option("-c,--config", opt.config_path, "JSON configuration file");
    app.add_option("-o,--out", opt.out_dir, "directory for artifact files");
    auto* seed_opt = app.add_option("-s,--seed", opt.seed, "random seed override");
    app.add_option("--eps", opt.eps_list, "comma-separated relaxation grid, e.g. 1/20,0.1");
    auto* mode_opt = app.add_option("--mode", opt.mode, "tree (exact) or mc (sampled)")
                         ->check(CLI::IsMember({"tree", "mc"}));
    app.add_flag("--allow-degenerate", opt.allow_degenerate,
                 "accept cost matrices with free round trips");
    app.add_flag("--quick", opt.quick, "smaller verification sizes");

    static const struct {
        const char* name;
        const char* help;
    } kCommands[] = {
        {"cone", "build the solvency cone and its dual from the cost matrix"},
        {"decompose", "write a target position change as canonical exchanges"},
        {"tree", "build the rationalized price tree and sample one path"},
        {"superhedge", "run the backward set recursion with consistency checks"},
        {"eps", "sweep probability-relaxed membership over the eps grid"},
        {"price", "construct and check a consistent price process"},
        {"verify", "run the self-check property suite"},
    };
    for (const auto& c : kCommands) app.add_subcommand(c.name, c.help);

    CLI11_PARSE(app, argc, argv);
    std::string command = app.get_subcommands().front()->get_name();

    // assemble the configuration: file first, then flag overrides
    Json cfg = Json::object();
    std::string raw_text;
    bool raw_fallback = false;
    if (!opt.config_path.empty()) {
        std::ifstream f(opt.config_path, std::ios::binary);
        if (!f) return emit_error("IoError", "cannot read \"" + opt.config_path + "\"");
        std::ostringstream buf;
        buf << f.rdbuf();
        raw_text = buf.str();
        cfg = Json::parse(raw_text, nullptr, false);
        if (cfg.is_discarded()) raw_fallback = true;   // let the library report it
    }
    if (!raw_fallback) {
        if (!opt.out_dir.empty()) cfg["out"] = opt.out_dir;
        if (*seed_opt) cfg["seed"] = opt.seed;
        if (!opt.eps_list.empty()) cfg["eps"] = split_list(opt.eps_list);
        if (!opt.mode.empty()) cfg["mode"] = opt.mode;
        if (opt.allow_degenerate) cfg["allow_degenerate"] = true;
        if (opt.quick) cfg["quick"] = true;
        raw_text = cfg.dump();
    }
    (void)mode_opt;

    shp_session* session = nullptr;
    int rc = shp_session_create(raw_text.c_str(), &session);
    if (rc != 0) {
        const char* err = shp_session_last_error(session);
        std::fprintf(stderr, "%s\n", err ? err : "{\"error\":{\"kind\":\"Internal\"}}");
        shp_session_destroy(session);
        return rc;
    }

    char* summary = nullptr;
    rc = shp_session_run(session, command.c_str(), &summary);
    if (rc == 0) {
        std::fputs(summary, stdout);
        shp_buffer_free(summary);
    } else {
        const char* err = shp_session_last_error(session);
        std::fprintf(stderr, "%s\n", err ? err : "{\"error\":{\"kind\":\"Internal\"}}");
    }
    shp_session_destroy(session);
    return rc;
}
