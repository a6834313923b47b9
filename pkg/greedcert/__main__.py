from greedcert.cli import main

raise SystemExit(main())
