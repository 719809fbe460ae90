# Copyright (©) 2026, Alexander Suvorov. All rights reserved.
