void str(char *s) {
  int i;

  hook(); for(i=0; s[i]; i++) {
    hook();  b->common.outstr[b->common.outidx++] = s[i];
  }
}

main() {
...
  if(child) {
    // thread 0
    hook(); str("ab");
    done();

  } else {
    // thread 1
    hook(); str("12");
    done();
  }
}
