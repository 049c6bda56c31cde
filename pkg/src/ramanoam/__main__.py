from ramanoam.cli import main

raise SystemExit(main())
