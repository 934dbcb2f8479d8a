"""
Jetcalc
Exact jet-level algebra of formal vector fields, normal forms and 1-forms
"""
