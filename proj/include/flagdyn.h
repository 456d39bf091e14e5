#ifndef FLAGDYN_H
#define FLAGDYN_H

/*
 * C interface to the flag-dynamics library.
 *
 * Every operation takes a JSON request string and produces a reply string
 * (JSON, or CSV where noted).  Replies are heap-allocated; release them with
 * flagdyn_string_free.  All functions return FLAGDYN_OK (0) on success; on
 * failure the reply is left NULL and flagdyn_last_error() describes the
 * problem (the pointer stays valid until the next call on the same thread).
 *
 * Floating-point values in replies are printed with 17 significant digits so
 * they round-trip exactly; identical requests produce byte-identical replies.
 */

#ifdef __cplusplus
extern "C" {
#endif

#ifndef FLAGDYN_API
#define FLAGDYN_API __attribute__((visibility("default")))
#endif

typedef enum flagdyn_status {
  FLAGDYN_OK = 0,
  FLAGDYN_ERR_SINGULAR_INPUT = 1,
  FLAGDYN_ERR_DEGENERATE_JOIN = 2,
  FLAGDYN_ERR_DEGENERATE_MEET = 3,
  FLAGDYN_ERR_INCIDENCE_VIOLATION = 4,
  FLAGDYN_ERR_NOT_REAL_DIAGONALIZABLE = 5,
  FLAGDYN_ERR_NON_CONVERGENT = 6,
  FLAGDYN_ERR_DOMAIN_VIOLATION = 7,
  FLAGDYN_ERR_AMBIGUOUS_LOCUS = 8,
  FLAGDYN_ERR_NOT_LOXODROMIC = 9,
  FLAGDYN_ERR_NOT_HYPERBOLIC = 10,
  FLAGDYN_ERR_NEGATIVE_EIGENVALUES = 11,
  FLAGDYN_ERR_NOT_GENERAL_POSITION = 12,
  FLAGDYN_ERR_WORD_TOO_LONG = 13,
  FLAGDYN_ERR_INVALID_WORD = 14,
  FLAGDYN_ERR_NEAR_LIMIT_SET = 15,
  FLAGDYN_ERR_NO_CERTIFICATE_FOUND = 16,
  FLAGDYN_ERR_NOT_IN_DOMAIN = 17,
  FLAGDYN_ERR_ON_FIXED_SET = 18,
  FLAGDYN_ERR_OUT_OF_CHART_DOMAIN = 19,
  FLAGDYN_ERR_BAD_CONFIG = 20,
  FLAGDYN_ERR_JSON = 100,
  FLAGDYN_ERR_UNKNOWN = 101
} flagdyn_status;

FLAGDYN_API const char* flagdyn_status_name(int status);
FLAGDYN_API const char* flagdyn_last_error(void);
FLAGDYN_API void flagdyn_string_free(char* s);

/* ---- stateless operations -------------------------------------------- */

/* request: {"pgl3":[9 row-major]} | {"sl2":[4]}, optional "sequence":true
 * with optional "n_probe".  reply: {"kind","type","loxodromic",...} */
FLAGDYN_API int flagdyn_classify(const char* request, char** reply);

/* request: {"pgl3":[9]} | {"sl2":[4]}
 * reply: fixed points, invariant lines, eigenvalues */
FLAGDYN_API int flagdyn_lox_objects(const char* request, char** reply);

/* request: element as above, "target": {"point":[3]}|{"line":[3]}|{"flag":[6]},
 * optional "delta", "n_probe".  reply: dynamic-set descriptor */
FLAGDYN_API int flagdyn_predict(const char* request, char** reply);

/* request: as predict, plus optional "trials","n_max","seed","samples".
 * reply: prediction plus sampled-oracle Hausdorff gaps */
FLAGDYN_API int flagdyn_verify_dynamics(const char* request, char** reply);

/* request: optional "point":[6 dir+conormal], "t","dt","forward".
 * reply: the three exponents */
FLAGDYN_API int flagdyn_lyapunov(const char* request, char** reply);

/* request: {"chart":1|2,"coords":[3]}.  reply: chart image, inverse round
 * trip, transition to the other chart where defined */
FLAGDYN_API int flagdyn_charts(const char* request, char** reply);

/* ---- subgroup handles -------------------------------------------------- */

typedef struct flagdyn_group flagdyn_group;

/* config: {"generators":[{"sl2":[[a,b],[c,d]]}|{"pgl3":[9]},...],
 *          "exponents":[..] (optional), "tube_radius":r (optional),
 *          "density":h (optional), "seed":n (optional)}
 * Generators are validated; the group is assembled immediately when both
 * exponents and tube_radius are present. */
FLAGDYN_API int flagdyn_group_create(const char* config, flagdyn_group** out);
FLAGDYN_API void flagdyn_group_destroy(flagdyn_group* g);

/* reply: generator count, exponents, radius, certificate if any */
FLAGDYN_API int flagdyn_group_describe(const flagdyn_group* g, char** reply);

/* request: {"exponents":[...],"tube_radius":r} or {"rmax":n,
 * "radius_grid":[...]} plus optional "density".  Builds/rebuilds the group.
 * reply: {"certified":bool, ...} (a failed certification is a reply, not an
 * error; an exhausted search returns FLAGDYN_ERR_NO_CERTIFICATE_FOUND). */
FLAGDYN_API int flagdyn_group_certify(flagdyn_group* g, const char* request, char** reply);

/* request: {"depth":n, optional "samples_per_circle", "components":bool}.
 * reply: entry/component summary; csv (optional, pass NULL to skip): one row
 * per sampled flag: word,6 coords,alpha|beta,parameter */
FLAGDYN_API int flagdyn_group_limit_set(flagdyn_group* g, const char* request, char** reply,
                                        char** csv);

/* request: {"flag":[6], optional "max_steps"}.  reply: {"in_omega",...} */
FLAGDYN_API int flagdyn_group_reduce(flagdyn_group* g, const char* request, char** reply);

/* request: {"flag":[6],"depth":n,"eps":e, optional "forward"}.
 * reply: {"kind":"escapes"|"recurrent"|"undetermined",...} */
FLAGDYN_API int flagdyn_group_fate(flagdyn_group* g, const char* request, char** reply);

/* request: {"flag":[6],"t_max":T,"dt":h}.  reply: summary; csv (optional):
 * t,6 coords,word per step */
FLAGDYN_API int flagdyn_group_orbit(flagdyn_group* g, const char* request, char** reply,
                                    char** csv);

#ifdef __cplusplus
}
#endif

#endif /* FLAGDYN_H */
