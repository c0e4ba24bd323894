#include "superhedge.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "shp/commands.hpp"
#include "shp/errors.hpp"
#include "shp/json_io.hpp"

struct shp_session {
    bool has_config = false;
    shp::RunConfig cfg;
    std::string last_error;   // JSON text; empty = no error recorded
};

namespace {

int record(shp_session* s, int cls, const std::string& kind, const std::string& invariant,
           const std::string& message) {
    if (s) {
        shp::Json e;
        e["error"]["kind"] = kind;
        e["error"]["invariant"] = invariant;
        e["error"]["message"] = message;
        e["error"]["class"] = cls;
        s->last_error = e.dump();
    }
    return cls;
}

int record(shp_session* s, const shp::Error& e) {
    return record(s, static_cast<int>(e.cls()), e.kind(), e.invariant(), e.what());
}

int record_unexpected(shp_session* s, const char* what) {
    return record(s, 2, "Internal", "the library reports failures through its error type",
                  what);
}

char* dup_to_c(const std::string& text) {
    char* buf = static_cast<char*>(std::malloc(text.size() + 1));
    if (!buf) return nullptr;
    std::memcpy(buf, text.c_str(), text.size() + 1);
    return buf;
}

} // namespace

extern "C" {

int shp_session_create(const char* config_json, shp_session** out_session) {
    if (!out_session) return 1;
    shp_session* s = new (std::nothrow) shp_session();
    *out_session = s;
    if (!s) return 2;
    if (!config_json)
        return record(s, 1, "BadConfig", "the configuration string is non-null",
                      "config_json is NULL");
    try {
        s->cfg = shp::parse_config_text(config_json);
        s->has_config = true;
        return 0;
    } catch (const shp::Error& e) {
        return record(s, e);
    } catch (const std::exception& e) {
        return record_unexpected(s, e.what());
    }
}

int shp_session_run(shp_session* session, const char* command, char** out_json) {
    if (out_json) *out_json = nullptr;
    if (!session) return 1;
    if (!session->has_config)
        return record(session, 1, "BadConfig", "the session holds a valid configuration",
                      "session creation failed; no configuration to run against");
    if (!command)
        return record(session, 1, "UnknownCommand", "the command string is non-null",
                      "command is NULL");
    if (!out_json)
        return record(session, 1, "BadConfig", "the output pointer is non-null",
                      "out_json is NULL");
    try {
        shp::Json summary = shp::run_command(command, session->cfg);
        char* buf = dup_to_c(summary.dump(2) + "\n");
        if (!buf)
            return record(session, 2, "Internal", "summary allocation succeeds",
                          "out of memory");
        *out_json = buf;
        return 0;
    } catch (const shp::Error& e) {
        return record(session, e);
    } catch (const std::exception& e) {
        return record_unexpected(session, e.what());
    }
}

const char* shp_session_last_error(const shp_session* session) {
    if (!session || session->last_error.empty()) return nullptr;
    return session->last_error.c_str();
}

void shp_buffer_free(char* buffer) { std::free(buffer); }

void shp_session_destroy(shp_session* session) { delete session; }

int shp_api_version(void) { return SHP_API_VERSION; }

} // extern "C"
