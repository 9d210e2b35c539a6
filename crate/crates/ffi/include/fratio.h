#ifndef FRATIO_H
#define FRATIO_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result of every fallible call.
 */
typedef enum {
  FRATIO_STATUS_OK = 0,
  /*
   A required pointer was null.
   */
  FRATIO_STATUS_NULL_POINTER = 1,
  /*
   Input text was not valid UTF-8.
   */
  FRATIO_STATUS_INVALID_UTF8 = 2,
  /*
   Input text did not parse.
   */
  FRATIO_STATUS_PARSE = 3,
  /*
   Input parsed but violates a precondition.
   */
  FRATIO_STATUS_INVALID_INPUT = 4,
  /*
   An intermediate value left the supported range.
   */
  FRATIO_STATUS_OVERFLOW = 5,
  /*
   An internal error; the call had no effect.
   */
  FRATIO_STATUS_INTERNAL = 6,
} FratioStatus;

/*
 A list whose entries are linear forms in up to four parameters.
 */
typedef struct FratioFamily FratioFamily;

/*
 A list of nonzero integers.
 */
typedef struct FratioList FratioList;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or null. The pointer
 stays valid until the next call on this thread.
 */
const char *fratio_last_error(void);

/*
 Releases a string returned by this library. Null is ignored.

 # Safety
 `s` must come from this library and not be freed twice.
 */
void fratio_string_free(char *s);

/*
 Parses a list such as `"30,1,-15,-10,-6"` or `"[1,-3,9]"`.

 # Safety
 `text` must be a nul-terminated string; `out` must be writable.
 */
FratioStatus fratio_list_parse(const char *text, FratioList **out);

/*
 # Safety
 `list` must come from [`fratio_list_parse`] and not be freed twice.
 */
void fratio_list_free(FratioList *list);

/*
 Number of entries after cancellation.

 # Safety
 `list` must be a live handle or null (which gives 0).
 */
size_t fratio_list_len(const FratioList *list);

/*
 Copies up to `cap` entries into `buf` and stores the full length in
 `*len`.

 # Safety
 `buf` must hold `cap` values; `len` must be writable.
 */
FratioStatus fratio_list_entries(const FratioList *list, int64_t *buf, size_t cap, size_t *len);

/*
 Landau test. Sets `*integral` to 1 or 0 and, when integral, `*height`.
 `verdict_json` may be null; otherwise it receives the full verdict.

 # Safety
 Pointers must be live; `integral` and `height` writable.
 */
FratioStatus fratio_list_check(const FratioList *list,
                               int32_t *integral,
                               int64_t *height,
                               char **verdict_json);

/*
 Exact norm as `"num/den"`.

 # Safety
 `list` must be live; `out` writable.
 */
FratioStatus fratio_list_norm(const FratioList *list, char **out);

/*
 Irreducibility certificate for a height-2 list. `prime` 0 tries every
 prime from 11 up. Sets `*irreducible` to 1 only on a certificate.

 # Safety
 `list` must be live; `irreducible` writable; `cert_json` may be null.
 */
FratioStatus fratio_list_certify(const FratioList *list,
                                 int64_t prime,
                                 int32_t *irreducible,
                                 char **cert_json);

/*
 Parses a family such as `"6a,b,-2a,-3a,-6b,-(a-5b)"`.

 # Safety
 `text` must be a nul-terminated string; `out` writable.
 */
FratioStatus fratio_family_parse(const char *text, FratioFamily **out);

/*
 # Safety
 `family` must come from [`fratio_family_parse`] and not be freed twice.
 */
void fratio_family_free(FratioFamily *family);

/*
 Number of parameters of a family; 0 for null.

 # Safety
 `family` must be a live handle or null.
 */
size_t fratio_family_dim(const FratioFamily *family);

/*
 Exact sweep of a two-parameter family. Sets `*passed` to 1 or 0; a
 failure comes with a witness point in `verdict_json`.

 # Safety
 `family` must be live; `passed` writable; `verdict_json` may be null.
 */
FratioStatus fratio_family_verify_exact(const FratioFamily *family,
                                        int32_t *passed,
                                        char **verdict_json);

/*
 Verifies one scope of the embedded catalog (`"all"` for everything).

 # Safety
 `scope` must be a nul-terminated string; `passed` writable;
 `report_json` may be null.
 */
FratioStatus fratio_catalog_verify(const char *scope, int32_t *passed, char **report_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FRATIO_H */
