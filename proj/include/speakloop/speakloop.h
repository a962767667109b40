#ifndef SPEAKLOOP_SPEAKLOOP_H
#define SPEAKLOOP_SPEAKLOOP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SL_API __declspec(dllexport)
#else
#define SL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sl_status {
  SL_OK = 0,
  SL_INVALID_ARGUMENT = 1,
  SL_EMPTY_SERIES = 2,
  SL_FORMAT = 3,
  SL_PARAMETER = 4,
  SL_NOT_FOUND = 5,
  SL_TRAINING = 6,
  SL_VERSION = 7,
  SL_DEGENERATE = 8,
  SL_UNDEFINED_STATISTIC = 9,
  SL_IO = 10,
  SL_PERMISSION = 11,
  SL_INTERNAL = 12
} sl_status;

SL_API const char* sl_version(void);
SL_API const char* sl_status_name(sl_status status);

/* Message of the most recent failing call on this thread, "" if none. */
SL_API const char* sl_last_error(void);

/* Frees strings returned through char** out parameters. */
SL_API void sl_string_free(char* s);

/* ---- offline analysis ---- */

typedef struct sl_analyze_options {
  const char* wav_path;
  const char* frames_path;     /* directory or tar archive */
  const char* transcript_path;
  const char* smile_path;      /* NULL: stub smile series */
  const char* feedback_path;   /* NULL: no comments or ratings */
  const char* models_dir;      /* NULL: no predicted scores */
  double max_audio_seconds;    /* <= 0: 180 */
  double max_frame_rate;       /* <= 0: 15 */
} sl_analyze_options;

/* Writes the FeedbackBundle JSON document to *bundle_json. */
SL_API sl_status sl_analyze(const sl_analyze_options* options, char** bundle_json);

/* Trains both moderation models. series_dir may be NULL. Writes model files
   into out_dir and the metrics document to *metrics_json (may be NULL). */
SL_API sl_status sl_train_moderation(const char* training_csv_path, const char* series_dir, uint64_t seed,
                                     const char* out_dir, char** metrics_json);

/* prompt_count <= 0 takes the prompt range from the export. Either output
   may be NULL. */
SL_API sl_status sl_stats_report(const char* export_csv, size_t export_size, int prompt_count, char** report_json,
                                 char** report_text);

/* ---- statistics ---- */

/* cells is raters x items, row major; 0 marks a missing rating. */
SL_API sl_status sl_krippendorff_alpha_ordinal(const int* cells, size_t raters, size_t items, int scale_min,
                                               int scale_max, double* alpha);

typedef struct sl_t_test {
  double t;
  double df;
  double p_two_tailed;
  double mean_difference;
  size_t n;
} sl_t_test;

SL_API sl_status sl_paired_t_test(const double* pre, const double* post, size_t n, sl_t_test* result);
SL_API sl_status sl_cohens_d(const double* a, size_t na, const double* b, size_t nb, double* d);
SL_API sl_status sl_cliffs_delta(const double* a, size_t na, const double* b, size_t nb, double* delta);

/* ---- platform ---- */

typedef struct sl_platform sl_platform;

typedef struct sl_platform_options {
  const char* data_dir;
  const char* config_path;  /* NULL: stored or default config */
  const char* models_dir;   /* NULL: bundles without predictions */
  int workers;              /* analysis threads */
  int synchronous_analysis; /* nonzero: analyse inside the upload request */
} sl_platform_options;

SL_API sl_status sl_platform_open(const sl_platform_options* options, sl_platform** platform);
SL_API void sl_platform_close(sl_platform* platform);

typedef struct sl_http_header {
  const char* name;
  const char* value;
} sl_http_header;

typedef struct sl_http_part {
  const char* name;
  const char* filename;
  const char* content_type;
  const char* data;
  size_t size;
} sl_http_part;

typedef struct sl_http_request {
  const char* method;
  const char* path; /* may carry a query string */
  const sl_http_header* headers;
  size_t header_count;
  const char* body;
  size_t body_size;
  const sl_http_part* parts;
  size_t part_count;
} sl_http_request;

typedef struct sl_http_response {
  int status;
  char* content_type;
  char* body;
  size_t body_size;
} sl_http_response;

SL_API sl_status sl_platform_handle(sl_platform* platform, const sl_http_request* request,
                                    sl_http_response* response);
SL_API void sl_http_response_free(sl_http_response* response);

/* condition is "treatment" or "control". */
SL_API sl_status sl_platform_add_user(sl_platform* platform, const char* user_id, const char* condition,
                                      char** token);
SL_API sl_status sl_platform_release_prompt(sl_platform* platform, int index);
SL_API sl_status sl_platform_wait_idle(sl_platform* platform);
SL_API sl_status sl_platform_state_hash(sl_platform* platform, uint64_t* hash);
SL_API sl_status sl_platform_export_ratings(sl_platform* platform, char** csv);
SL_API sl_status sl_platform_config(sl_platform* platform, char** config_json);

#ifdef __cplusplus
}
#endif

#endif
