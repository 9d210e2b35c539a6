#include <stdio.h>
#include <string.h>

#include "fratio.h"

#define CHECK(cond)                                              \
    do {                                                         \
        if (!(cond)) {                                           \
            fprintf(stderr, "line %d: %s\n", __LINE__, #cond);  \
            return 1;                                            \
        }                                                        \
    } while (0)

int main(void) {
    FratioList *list = NULL;
    CHECK(fratio_list_parse("30,1,-15,-10,-6", &list) == FRATIO_STATUS_OK);
    int32_t integral = 0;
    int64_t height = 0;
    CHECK(fratio_list_check(list, &integral, &height, NULL) == FRATIO_STATUS_OK);
    CHECK(integral == 1 && height == 1);
    fratio_list_free(list);

    CHECK(fratio_list_parse("1,-3,9", &list) == FRATIO_STATUS_OK);
    char *norm = NULL;
    CHECK(fratio_list_norm(list, &norm) == FRATIO_STATUS_OK);
    CHECK(strcmp(norm, "17/108") == 0);
    fratio_string_free(norm);
    fratio_list_free(list);

    CHECK(fratio_list_parse("1,x", &list) == FRATIO_STATUS_PARSE);
    CHECK(fratio_last_error() != NULL);

    FratioFamily *fam = NULL;
    CHECK(fratio_family_parse("3a,18a,-a,-9a,-b,-11a+b", &fam) == FRATIO_STATUS_OK);
    int32_t passed = 1;
    char *verdict = NULL;
    CHECK(fratio_family_verify_exact(fam, &passed, &verdict) == FRATIO_STATUS_OK);
    CHECK(passed == 0 && strstr(verdict, "\"fails\"") != NULL);
    fratio_string_free(verdict);
    fratio_family_free(fam);

    puts("ok");
    return 0;
}
