/* C interface to the superhedging toolkit.
 *
 * Usage pattern:
 *
 *   shp_session* s = NULL;
 *   if (shp_session_create(config_json, &s) != 0) {
 *       fputs(shp_session_last_error(s), stderr);
 *       shp_session_destroy(s);
 *       return 1;
 *   }
 *   char* summary = NULL;
 *   int rc = shp_session_run(s, "superhedge", &summary);
 *   if (rc == 0) {
 *       puts(summary);
 *       shp_buffer_free(summary);
 *   } else {
 *       fputs(shp_session_last_error(s), stderr);
 *   }
 *   shp_session_destroy(s);
 *
 * Return codes on every fallible call:
 *   0  success
 *   1  domain error: bad configuration, invalid inputs, infeasible or
 *      out-of-budget requests
 *   2  internal error: a library invariant failed; report these
 *
 * All functions are thread-compatible: distinct sessions may be used from
 * distinct threads, a single session must not be shared without locking.
 */

#ifndef SUPERHEDGE_H
#define SUPERHEDGE_H

#define SHP_API_VERSION 1

#ifdef __cplusplus
extern "C" {
#endif

typedef struct shp_session shp_session;

/* Parse a JSON configuration and build a session around it.
 *
 * Always stores a session handle in *out_session (even on failure, so the
 * error can be read); the handle must be released with shp_session_destroy.
 * Returns 0 when the configuration parsed and validated, 1/2 otherwise. */
int shp_session_create(const char* config_json, shp_session** out_session);

/* Run one command ("cone", "decompose", "tree", "superhedge", "eps",
 * "price", "verify") against the session configuration.
 *
 * On success stores a NUL-terminated JSON summary in *out_json; release it
 * with shp_buffer_free. On failure stores NULL and records the error on the
 * session. */
int shp_session_run(shp_session* session, const char* command, char** out_json);

/* JSON description of the most recent error on this session:
 *   {"error": {"kind": "...", "invariant": "...", "message": "...", "class": 1}}
 * Owned by the session, valid until the next call on it. NULL when the
 * session has not recorded any error. */
const char* shp_session_last_error(const shp_session* session);

/* Release a buffer produced by shp_session_run. Accepts NULL. */
void shp_buffer_free(char* buffer);

/* Release a session. Accepts NULL. */
void shp_session_destroy(shp_session* session);

/* The SHP_API_VERSION the library was built with. */
int shp_api_version(void);

#ifdef __cplusplus
}
#endif

#endif /* SUPERHEDGE_H */
