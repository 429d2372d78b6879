#ifndef DMAC_DMAC_H_
#define DMAC_DMAC_H_

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define DMAC_API __declspec(dllexport)
#else
#define DMAC_API __attribute__((visibility("default")))
#endif

typedef enum dmac_status {
  DMAC_OK = 0,
  DMAC_ERR_CONFIG = 1,
  DMAC_ERR_NUMERICAL = 2,
  DMAC_ERR_TRAINING = 3,
  DMAC_ERR_IO = 4,
  DMAC_ERR_ARGUMENT = 5,
  DMAC_ERR_INTERNAL = 6
} dmac_status;

/* Opaque, validated run configuration. */
typedef struct dmac_config dmac_config;

DMAC_API const char* dmac_version(void);

/* Message of the last failure on the calling thread; "" if none. */
DMAC_API const char* dmac_last_error(void);

DMAC_API dmac_status dmac_config_load(const char* path, dmac_config** out);
DMAC_API dmac_status dmac_config_parse(const char* json, dmac_config** out);
DMAC_API void dmac_config_free(dmac_config* config);

DMAC_API dmac_status dmac_config_set_seed(dmac_config* config,
                                          unsigned long long seed);
DMAC_API dmac_status dmac_config_set_output_dir(dmac_config* config,
                                                const char* dir);
DMAC_API unsigned long long dmac_config_seed(const dmac_config* config);

/* Effective config as JSON; release with dmac_string_free. */
DMAC_API dmac_status dmac_config_to_json(const dmac_config* config,
                                         char** out);
DMAC_API void dmac_string_free(char* s);

/* Commands. On success `summary` (nullable) receives a one-line report to
 * release with dmac_string_free. */
DMAC_API dmac_status dmac_gen_dataset(const dmac_config* config,
                                      char** summary);
DMAC_API dmac_status dmac_train(const dmac_config* config, char** summary);
DMAC_API dmac_status dmac_run(const dmac_config* config, char** summary);
DMAC_API dmac_status dmac_sweep(const dmac_config* config,
                                unsigned int workers, char** summary);

#ifdef __cplusplus
}
#endif

#endif  // DMAC_DMAC_H_
