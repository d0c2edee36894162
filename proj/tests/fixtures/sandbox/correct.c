#include <stdio.h>

int run(void) {
    printf("ok\n");
    return 0;
}
