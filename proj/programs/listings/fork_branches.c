  if(child) {
    // thread 0
    hook(); printf("a");
    hook(); printf("b");
    done();

  } else {
    // thread 1

    hook(); printf("1");
    hook(); printf("2");
    done();
  }
