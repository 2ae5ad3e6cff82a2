from mcaoi.cli import main

raise SystemExit(main())
