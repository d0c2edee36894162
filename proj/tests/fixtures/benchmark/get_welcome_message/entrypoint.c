#include <stdio.h>
#include <stdlib.h>

char* get_welcome_message(const char* username);

int main(int argc, char** argv) {
    if (argc != 2) {
        fprintf(stderr, "usage: %s USERNAME\n", argv[0]);
        return 2;
    }
    char* message = get_welcome_message(argv[1]);
    if (message == NULL) {
        printf("REJECTED\n");
        return 0;
    }
    printf("%s\n", message);
    free(message);
    return 0;
}
