// Copyright 2026 The crane-twin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#ifndef CRANETWIN_CRANETWIN_H
#define CRANETWIN_CRANETWIN_H

/* C interface of the crane digital twin.
 *
 * Objects are opaque handles. Every fallible call returns a ct_status;
 * the message of the last failure on the calling thread is available from
 * ct_last_error(). Strings returned through char** are JSON documents (or
 * plain text where noted), owned by the caller and released with ct_free().
 */

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define CT_API __attribute__((visibility("default")))
#else
#define CT_API
#endif

typedef enum ct_status {
  CT_OK = 0,
  CT_ERR_DOMAIN = 1,      /* argument outside the accepted domain */
  CT_ERR_SINGULARITY = 2,
  CT_ERR_NUMERICAL = 3,
  CT_ERR_STATE = 4,       /* not allowed in the current state */
  CT_ERR_BUSY = 5,
  CT_ERR_NOT_FOUND = 6,
  CT_ERR_CONFLICT = 7,
  CT_ERR_PROTOCOL = 8,
  CT_ERR_CONNECTION = 9,  /* port in use, peer unreachable */
  CT_ERR_STORAGE = 10,
  CT_ERR_TIMEOUT = 11,
  CT_ERR_INTERNAL = 12,
  CT_ERR_INVALID_ARGUMENT = 13 /* NULL handle or pointer */
} ct_status;

CT_API const char* ct_version(void);
CT_API const char* ct_status_name(ct_status status);
/* Thread-local; empty string after a successful call. */
CT_API const char* ct_last_error(void);
CT_API void ct_free(void* ptr);

/* ---- configuration -------------------------------------------------- */

/* Defaults merged with the JSON file at path (NULL or "" for defaults only). */
CT_API ct_status ct_config_load(const char* path, char** out_json);

/* ---- stack ------------------------------------------------------------ */

typedef struct ct_stack ct_stack;
typedef void (*ct_ready_fn)(const char* line, void* user);

/* config_json: a full or partial configuration document; NULL for defaults. */
CT_API ct_status ct_stack_create(const char* config_json, ct_stack** out);
/* Starts every service; on_ready (may be NULL) receives one line per service.
 * A busy port yields CT_ERR_CONNECTION with the port in the message. */
CT_API ct_status ct_stack_start(ct_stack* stack, ct_ready_fn on_ready, void* user);
CT_API int ct_stack_gateway_port(const ct_stack* stack);
CT_API int ct_stack_broker_port(const ct_stack* stack);
CT_API ct_status ct_stack_stop(ct_stack* stack);
CT_API void ct_stack_destroy(ct_stack* stack);

/* ---- gateway client --------------------------------------------------- */

typedef struct ct_client ct_client;

CT_API ct_status ct_client_create(const char* host, int port, double timeout_seconds,
                                  ct_client** out);
/* Any HTTP status counts as CT_OK; transport failures are CT_ERR_CONNECTION.
 * body may be NULL. */
CT_API ct_status ct_client_request(ct_client* client, const char* method, const char* path,
                                   const char* body, int* http_status, char** out_body);
CT_API void ct_client_destroy(ct_client* client);

/* ---- offline data-directory access ------------------------------------ */

CT_API ct_status ct_runs_list(const char* data_dir, char** out_json);
/* Run record plus available trace kinds and, when present, the report. */
CT_API ct_status ct_run_show(const char* data_dir, const char* run_id, char** out_json);
CT_API ct_status ct_run_trace(const char* data_dir, const char* run_id, const char* kind,
                              char** out_json);
/* Writes <out_dir>/<kind>.csv for every stored trace kind; returns
 * {"files": [{"kind", "path", "samples"}]}. */
CT_API ct_status ct_run_export_csv(const char* data_dir, const char* run_id, const char* out_dir,
                                   char** out_json);
/* Re-validates a stored run with the thresholds of config_json merged with the
 * runtime overrides persisted in the data directory; returns the report. */
CT_API ct_status ct_run_validate(const char* config_json, const char* run_id, char** out_json);

/* ---- pure computations ------------------------------------------------ */

/* Trajectory request as on dt/trajectory/request; params_json may be NULL. */
CT_API ct_status ct_plan_trajectory(const char* request_json, const char* params_json,
                                    char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* CRANETWIN_CRANETWIN_H */
